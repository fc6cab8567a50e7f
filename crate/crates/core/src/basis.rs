//! Exponentially weighted Laguerre basis on `x > 0`.
//!
//! `L_n(x) = L_{n-1}(2 a x) exp(-a x)` with spectrum
//! `k0 L~_n(kx) = j (kx - j a)^(n-1) / (kx + j a)^n`. With the Cayley
//! variable `w = (kx - j a)/(kx + j a)` the product of a test and a basis
//! spectrum is `w^(n-m) / (kx^2 + a^2)`, which is what makes every MoM block
//! Toeplitz.

use std::f64::consts::PI;

use crate::green::uniform_sw_wavenumbers;
use crate::model::StructureSpec;
use crate::{Error, Result, C64, J};

/// Largest supported basis size per component.
pub const MAX_N: usize = 64;

/// How the decay coefficient `a` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisStrategy {
    /// `a = 1/2`: the orthonormal Laguerre functions.
    FixedHalf,
    /// `a = sqrt(kz^2 - 1)`, the transverse decay of a line source.
    ModeMatched,
    /// Fixed user value.
    UserValue(C64),
    /// `a = j kx` with `kx` the transverse wavenumber of the surface wave of
    /// the `x > 0` half-plane at the current `kz`; falls back to
    /// `ModeMatched` when that plane carries no decaying surface wave.
    SurfaceMatched,
}

impl BasisStrategy {
    pub fn depends_on_kz(&self) -> bool {
        matches!(self, BasisStrategy::ModeMatched | BasisStrategy::SurfaceMatched)
    }
}

/// Basis sizes plus the resolved coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    pub n_x: usize,
    pub n_z: usize,
    pub a: C64,
    pub strategy: BasisStrategy,
}

fn check_sizes(n_x: usize, n_z: usize) -> Result<()> {
    if n_x == 0 && n_z == 0 {
        return Err(Error::BadBasisSize("at least one component needs a basis function".into()));
    }
    if n_x > MAX_N || n_z > MAX_N {
        return Err(Error::BadBasisSize(format!("at most {MAX_N} functions per component")));
    }
    Ok(())
}

impl BasisSpec {
    /// Resolves `strategy` at `kz` for `structure`.
    pub fn new(
        n_x: usize,
        n_z: usize,
        strategy: BasisStrategy,
        kz: C64,
        structure: &StructureSpec,
    ) -> Result<Self> {
        check_sizes(n_x, n_z)?;
        let a = match strategy {
            BasisStrategy::FixedHalf => C64::new(0.5, 0.0),
            BasisStrategy::ModeMatched => mode_matched_a(kz)?,
            BasisStrategy::UserValue(a) => a,
            BasisStrategy::SurfaceMatched => surface_matched_a(kz, structure)?,
        };
        if !(a.re > 0.0) || !a.is_finite() {
            return Err(Error::BadCoefficient(a));
        }
        Ok(Self { n_x, n_z, a, strategy })
    }

    /// Fixed coefficient, independent of `kz`.
    pub fn with_a(n_x: usize, n_z: usize, a: C64) -> Result<Self> {
        check_sizes(n_x, n_z)?;
        if !(a.re > 0.0) || !a.is_finite() {
            return Err(Error::BadCoefficient(a));
        }
        Ok(Self { n_x, n_z, a, strategy: BasisStrategy::UserValue(a) })
    }

    pub fn square(n: usize, strategy: BasisStrategy, kz: C64, structure: &StructureSpec) -> Result<Self> {
        Self::new(n, n, strategy, kz, structure)
    }

    /// Same sizes and strategy, coefficient re-resolved at `kz`.
    pub fn refreshed(&self, kz: C64, structure: &StructureSpec) -> Result<Self> {
        if self.strategy.depends_on_kz() {
            Self::new(self.n_x, self.n_z, self.strategy, kz, structure)
        } else {
            Ok(*self)
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_x.max(self.n_z)
    }

    pub fn dim(&self) -> usize {
        self.n_x + self.n_z
    }
}

/// `sqrt(kz^2 - 1)` on the branch with positive real part.
pub fn mode_matched_a(kz: C64) -> Result<C64> {
    let a = (kz * kz - 1.0).sqrt();
    let a = if a.re < 0.0 { -a } else { a };
    if !(a.re > 0.0) {
        return Err(Error::BadCoefficient(a));
    }
    Ok(a)
}

/// `j kx` for the slowest-decaying surface wave of the `x > 0` plane.
pub fn surface_matched_a(kz: C64, structure: &StructureSpec) -> Result<C64> {
    let mut best: Option<C64> = None;
    for w in uniform_sw_wavenumbers(&structure.y2) {
        let mut kx = (w.kt * w.kt - kz * kz).sqrt();
        if kx.im > 0.0 {
            kx = -kx;
        }
        let a = J * kx;
        if a.re > 1e-12 && best.map_or(true, |b| a.re < b.re) {
            best = Some(a);
        }
    }
    match best {
        Some(a) => Ok(a),
        None => mode_matched_a(kz),
    }
}

/// `L_0(u) .. L_{n-1}(u)` by forward recurrence.
pub fn laguerre_all(n: usize, u: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(C64::new(1.0, 0.0));
    if n == 1 {
        return out;
    }
    out.push(1.0 - u);
    for k in 1..n - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - u) * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `L_k(u)`.
pub fn laguerre(k: usize, u: C64) -> C64 {
    laguerre_all(k + 1, u)[k]
}

/// Spatial basis function `n >= 1` at `xhat = k0 x`.
pub fn basis_spatial(n: usize, a: C64, xhat: f64) -> Result<C64> {
    if xhat < 0.0 {
        return Err(Error::NegativeAbscissa(xhat));
    }
    if n == 0 {
        return Err(Error::BadBasisSize("basis index starts at 1".into()));
    }
    Ok(laguerre(n - 1, 2.0 * a * xhat) * (-a * xhat).exp())
}

/// All spatial basis functions `1..=n` at `xhat`.
pub fn basis_spatial_all(n: usize, a: C64, xhat: f64) -> Result<Vec<C64>> {
    if xhat < 0.0 {
        return Err(Error::NegativeAbscissa(xhat));
    }
    let e = (-a * xhat).exp();
    Ok(laguerre_all(n, 2.0 * a * xhat).into_iter().map(|l| l * e).collect())
}

/// Normalized spectrum `k0 L~_n(kx)`.
pub fn basis_spectral(n: usize, a: C64, kx: C64) -> Result<C64> {
    if n == 0 {
        return Err(Error::BadBasisSize("basis index starts at 1".into()));
    }
    let den = kx + J * a;
    if den.norm() <= 1e-300 {
        return Err(Error::Singular { kind: "basis pole", kx });
    }
    let w = (kx - J * a) / den;
    Ok(J * w.powi(n as i32 - 1) / den)
}

/// `int L~_m(-k) L~_n(k) dk = (pi / a) delta_mn`.
pub fn overlap_identity(m: usize, n: usize, a: C64) -> C64 {
    if m == n {
        PI / a
    } else {
        C64::new(0.0, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn spatial_examples() {
        assert_eq!(basis_spatial(1, c(0.5, 0.0), 0.0).unwrap(), c(1.0, 0.0));
        let v = basis_spatial(2, c(0.5, 0.0), 2.0).unwrap();
        assert!((v - c(-(-1f64).exp(), 0.0)).norm() < 1e-15);
        assert!(basis_spatial(1, c(0.5, 0.0), -1.0).is_err());
    }

    #[test]
    fn spatial_against_explicit_polynomial() {
        // L_4(u) = (u^4 - 16 u^3 + 72 u^2 - 96 u + 24) / 24
        let a = c(0.3, 0.1);
        let x = 4.0;
        let u = 2.0 * a * x;
        let l4 = (u.powi(4) - 16.0 * u.powi(3) + 72.0 * u.powi(2) - 96.0 * u + 24.0) / 24.0;
        let v = basis_spatial(5, a, x).unwrap();
        assert!((v - l4 * (-a * x).exp()).norm() < 1e-13);
    }

    #[test]
    fn spectral_examples() {
        let a = c(0.5, 0.0);
        assert!((basis_spectral(1, a, c(0.0, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((basis_spectral(2, a, c(0.0, 0.0)).unwrap() - c(-2.0, 0.0)).norm() < 1e-15);
        assert!(basis_spectral(1, a, -J * a).is_err());
    }

    #[test]
    fn overlap_examples() {
        assert!((overlap_identity(1, 1, c(0.5, 0.0)) - c(2.0 * PI, 0.0)).norm() < 1e-15);
        assert_eq!(overlap_identity(1, 3, c(0.7, 0.2)), c(0.0, 0.0));
    }

    #[test]
    fn mode_matched_branch() {
        let a = mode_matched_a(c(2.5, 0.0)).unwrap();
        assert!((a - c(5.25f64.sqrt(), 0.0)).norm() < 1e-12);
        for re in [1.05, 1.3, 1.548, 2.0, 2.2] {
            for im in [0.0, -0.01, -0.111, -0.4] {
                let a = mode_matched_a(c(re, im)).unwrap();
                assert!(a.re > 0.0);
                assert!((a * a - (c(re, im) * c(re, im) - 1.0)).norm() < 1e-12);
            }
        }
        assert!(mode_matched_a(c(0.5, 0.0)).is_err());
    }

    #[test]
    fn surface_matched_tracks_right_half_plane() {
        let s = StructureSpec::isotropic(c(0.0, -0.5), c(0.1, -0.5)).unwrap();
        let kz = c(1.548, -0.111);
        let a = surface_matched_a(kz, &s).unwrap();
        assert!(a.re > 0.0 && a.re < 1.0 && a.im > 1.0, "{a}");
        // bound regime on a capacitive right plane: real decay constant
        let s = StructureSpec::isotropic(c(0.0, 1.0 / 3f64.sqrt()), c(0.0, -3f64.sqrt())).unwrap();
        let a = surface_matched_a(c(2.47, 0.0), &s).unwrap();
        assert!((a - c((2.47f64 * 2.47 - 4.0 / 3.0).sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sizes_are_validated() {
        let s = StructureSpec::isotropic(c(0.0, 1.0), c(0.0, -1.0)).unwrap();
        assert!(BasisSpec::new(0, 0, BasisStrategy::FixedHalf, c(1.5, 0.0), &s).is_err());
        assert!(BasisSpec::new(65, 1, BasisStrategy::FixedHalf, c(1.5, 0.0), &s).is_err());
        assert!(BasisSpec::with_a(2, 2, c(-0.1, 0.0)).is_err());
        let b = BasisSpec::new(3, 2, BasisStrategy::FixedHalf, c(1.5, 0.0), &s).unwrap();
        assert_eq!(b.a, c(0.5, 0.0));
        assert_eq!((b.n_max(), b.dim()), (3, 5));
    }

    #[test]
    fn spectral_decay() {
        let a = c(0.4, 0.2);
        for n in 1..6 {
            for k in [10.0, 50.0, 400.0, -30.0] {
                let v = basis_spectral(n, a, c(k, 0.0)).unwrap();
                assert!(v.norm() <= 1.5 / f64::abs(k));
            }
        }
    }
}
