use thiserror::Error;

use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("PEC limit unsupported; use large finite admittance")]
    ZeroImpedance,

    #[error("singular dyadic: {0}")]
    SingularDyadic(&'static str),

    #[error("on-axis spectral point; TM/TE basis undefined")]
    OnAxis,

    #[error("vertical wavenumber vanishes (branch point)")]
    BranchPoint,

    #[error("spectral point hits a {kind} singularity at kx = {kx}")]
    Singular { kind: &'static str, kx: C64 },

    #[error("basis supported on x >= 0 only (got x = {0})")]
    NegativeAbscissa(f64),

    #[error("basis coefficient must satisfy Re(a) > 0 (got {0})")]
    BadCoefficient(C64),

    #[error("invalid basis size: {0}")]
    BadBasisSize(String),

    #[error("degenerate structure: no line discontinuity")]
    ZeroContrast,

    #[error("nonzero source/observation height is not supported")]
    NonzeroHeight,

    #[error("quadrature did not converge after {levels} levels (estimate {estimate}, error {error:e})")]
    Quadrature { estimate: C64, error: f64, levels: usize },

    #[error("quadrature failed in block {block}, d = {d}: {source}")]
    Assembly {
        block: &'static str,
        d: i64,
        #[source]
        source: Box<Error>,
    },

    #[error("no root in window around {center}")]
    NoRoot { center: C64 },

    #[error("root search stagnated; best iterate {best} with |residual| = {residual:e}")]
    Stagnation { best: C64, residual: f64 },

    #[error("non-finite residual at kz = {0}")]
    NonFinite(C64),

    #[error("first sweep point failed: {0}")]
    SweepStart(Box<Error>),

    #[error("invalid configuration: {0}")]
    Config(String),
}
