//! Shared fixtures for the benchmarks.

use linewave::{c, BasisSpec, BasisStrategy, StructureSpec, C64};

/// Bound-mode structure: inductive `j/sqrt3` against capacitive `-j sqrt3`.
pub fn bound_structure() -> StructureSpec {
    StructureSpec::isotropic(c(0.0, 1.0 / 3f64.sqrt()), c(0.0, -3f64.sqrt())).unwrap()
}

/// Resistive right half-plane; its line wave is leaky.
pub fn leaky_structure() -> StructureSpec {
    StructureSpec::isotropic(c(0.0, -0.5), c(0.1, -0.5)).unwrap()
}

pub const BOUND_KZ: C64 = C64::new(2.4722, 0.0);
pub const LEAKY_KZ: C64 = C64::new(1.54, -0.12);

pub fn mode_matched(n: usize, s: &StructureSpec, kz: C64) -> BasisSpec {
    BasisSpec::new(n, n, BasisStrategy::ModeMatched, kz, s).unwrap()
}
