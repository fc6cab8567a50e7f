//! Line waves on two-part impedance planes.
//!
//! A spectral-domain method of moments for the modes guided along the
//! junction `x = 0` of two (possibly anisotropic) impedance half-planes.
//! The plane `y = 0` is opaque; fields live in `y > 0`.
//!
//! All quantities are normalized: wavenumbers by `k0`, impedances by `eta0`,
//! admittances by `1/eta0`. The time convention is `exp(+j omega t)` and a
//! mode varies as `exp(-j kz z)`.
//!
//! The pipeline, bottom to top:
//!
//! * [`model`]: admittance dyadics and structures.
//! * [`green`]: spectral Green's function of a uniform impedance plane.
//! * [`basis`]: exponentially weighted Laguerre basis.
//! * [`kernel`]: integral-equation kernel and its singularities.
//! * [`quadrature`]: double-exponential quadrature on the real line.
//! * [`mom`]: Toeplitz Galerkin matrix and the dispersion residual.
//! * [`rootfind`]: Padé/Muller complex root search and sweeps.
//! * [`fields`]: current and field reconstruction.
//! * [`reference`]: slow independent oracles.

pub mod basis;
pub mod fields;
pub mod green;
pub mod kernel;
pub mod model;
pub mod mom;
pub mod quadrature;
pub mod reference;
pub mod rootfind;

mod error;
pub mod linalg;

pub use num_complex::Complex64 as C64;

pub use basis::{BasisSpec, BasisStrategy};
pub use error::{Error, Result};
pub use fields::{Diagnostics, FieldSample, ModeSolution};
pub use green::{GreenDyadic, Sheet};
pub use kernel::{KernelEvaluator, SingularityCatalog};
pub use model::{AdmittanceDyadic, Dyadic, Normalization, SheetWavenumber, StructureSpec};
pub use mom::{MoMSystem, NullSpace};
pub use quadrature::{QuadResult, QuadratureConfig};
pub use rootfind::{RootReport, RootSearchConfig, SweepPoint};

/// Imaginary unit.
pub const J: C64 = C64::new(0.0, 1.0);

/// Shorthand for building a complex number.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
