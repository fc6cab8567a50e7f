//! Integral-equation kernel `K = I - (Y2 - Y1) . G` and its singularities.
//!
//! The structure is replaced by the uniform plane `Y1` extended over the
//! whole of `y = 0`, plus an electric current sheet on `x > 0` whose
//! transition condition `j = (Y2 - Y1) . e` restores the right half-plane.
//! Substituting the field of that sheet into its own transition condition
//! gives a homogeneous equation on `x > 0` whose spectral kernel is `K`.
//! Extending `Y2` instead is the same construction on the mirrored
//! structure, see [`StructureSpec::swapped`].
//!
//! Note that `K` does not tend to the identity for large `|kx|`: `G_xx`
//! tends to the quasi-static value `-1/Y1_xx`, so `K_xx -> Y2_xx / Y1_xx` in
//! the isotropic case. Only the `zz` and mixed entries approach their
//! identity values.

use crate::green::{green_from_dyadic, gxx_asymptote, sw_poles_kx, vertical_wavenumber, Sheet};
use crate::model::{Dyadic, StructureSpec};
use crate::{Error, Result, C64, J};

/// Default axis distance under which a singularity triggers a warning.
pub const DEFAULT_PROXIMITY_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    BranchPoint,
    SurfaceWavePole,
    BasisPole,
}

impl SingularityKind {
    pub fn name(&self) -> &'static str {
        match self {
            SingularityKind::BranchPoint => "branch-point",
            SingularityKind::SurfaceWavePole => "surface-wave pole",
            SingularityKind::BasisPole => "basis pole",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub kind: SingularityKind,
    pub kx: C64,
    /// Distance to the real `kx` axis.
    pub proximity: f64,
}

/// Singularities of the MoM integrands in the complex `kx` plane.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SingularityCatalog {
    pub branch_points: Vec<C64>,
    pub sw_poles: Vec<C64>,
    pub basis_poles: Vec<C64>,
    pub entries: Vec<Singularity>,
}

impl SingularityCatalog {
    fn push(&mut self, kind: SingularityKind, kx: C64) {
        match kind {
            SingularityKind::BranchPoint => self.branch_points.push(kx),
            SingularityKind::SurfaceWavePole => self.sw_poles.push(kx),
            SingularityKind::BasisPole => self.basis_poles.push(kx),
        }
        self.entries.push(Singularity { kind, kx, proximity: kx.im.abs() });
    }

    /// Real parts of the singularities closer than `threshold` to the axis,
    /// sorted and deduplicated.
    pub fn near_axis(&self, threshold: f64) -> Vec<f64> {
        let mut v: Vec<f64> =
            self.entries.iter().filter(|s| s.proximity < threshold).map(|s| s.kx.re).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        v
    }

    pub fn min_proximity(&self) -> f64 {
        self.entries.iter().map(|s| s.proximity).fold(f64::INFINITY, f64::min)
    }

    /// Largest `|Re kx|` over all entries.
    pub fn max_abs_re(&self) -> f64 {
        self.entries.iter().map(|s| s.kx.re.abs()).fold(0.0, f64::max)
    }

    pub fn with_extra(mut self, kind: SingularityKind, kx: C64) -> Self {
        self.push(kind, kx);
        self
    }
}

/// Builds the catalog at `kz` for basis coefficient `a`.
pub fn build_catalog(structure: &StructureSpec, kz: C64, a: Option<C64>, sheet: Sheet) -> SingularityCatalog {
    let mut cat = SingularityCatalog::default();
    let kbp = vertical_wavenumber(kz * kz, sheet);
    cat.push(SingularityKind::BranchPoint, kbp);
    cat.push(SingularityKind::BranchPoint, -kbp);
    for p in sw_poles_kx(&structure.y1, kz, sheet) {
        cat.push(SingularityKind::SurfaceWavePole, p);
    }
    if let Some(a) = a {
        cat.push(SingularityKind::BasisPole, J * a);
        cat.push(SingularityKind::BasisPole, -J * a);
    }
    cat
}

/// Evaluates `K(kx)` at fixed `kz`.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    pub structure: StructureSpec,
    pub kz_hat: C64,
    pub sheet: Sheet,
    pub catalog: SingularityCatalog,
    y1: Dyadic,
    contrast: Dyadic,
    dispersive: bool,
}

impl KernelEvaluator {
    pub fn new(structure: &StructureSpec, kz_hat: C64, sheet: Sheet, a: Option<C64>) -> Result<Self> {
        Self::with_warning(structure, kz_hat, sheet, a, DEFAULT_PROXIMITY_WARNING)
    }

    pub fn with_warning(
        structure: &StructureSpec,
        kz_hat: C64,
        sheet: Sheet,
        a: Option<C64>,
        warn_below: f64,
    ) -> Result<Self> {
        if structure.has_zero_contrast() {
            return Err(Error::ZeroContrast);
        }
        let catalog = build_catalog(structure, kz_hat, a, sheet);
        for s in &catalog.entries {
            if s.proximity < warn_below {
                log::warn!(
                    "{} at kx = {} lies {:e} from the real axis (kz = {})",
                    s.kind.name(),
                    s.kx,
                    s.proximity,
                    kz_hat
                );
            }
        }
        let y1 = *structure.y1.nominal();
        let contrast = *structure.y2.nominal() - y1;
        let dispersive = structure.y1.is_dispersive() || structure.y2.is_dispersive();
        Ok(Self { structure: structure.clone(), kz_hat, sheet, catalog, y1, contrast, dispersive })
    }

    /// `K` with singularity checks.
    pub fn kernel_at(&self, kx: C64) -> Result<Dyadic> {
        for s in &self.catalog.entries {
            if s.kind != SingularityKind::BasisPole && (kx - s.kx).norm() <= 1e-14 * s.kx.norm().max(1.0) {
                return Err(Error::Singular { kind: s.kind.name(), kx });
            }
        }
        let k = self.eval(kx)?;
        if !k.is_finite() {
            return Err(Error::Singular { kind: "non-finite kernel", kx });
        }
        Ok(k)
    }

    /// `K` without catalog checks, for quadrature nodes.
    #[inline]
    pub fn eval(&self, kx: C64) -> Result<Dyadic> {
        let (y1, dy) = if self.dispersive {
            (self.structure.y1.at(kx, self.kz_hat), self.structure.contrast_at(kx, self.kz_hat))
        } else {
            (self.y1, self.contrast)
        };
        let g = green_from_dyadic(&y1, kx, self.kz_hat, self.sheet)?.as_dyadic();
        Ok(Dyadic::IDENTITY - dy.matmul(&g))
    }

    /// `K` at a real node, zero when the point is degenerate.
    #[inline]
    pub fn eval_real(&self, kx: f64) -> Dyadic {
        self.eval(C64::new(kx, 0.0)).unwrap_or(Dyadic::ZERO)
    }

    /// Limit of `K` as `|kx| -> inf` along the real axis.
    pub fn asymptote(&self) -> Dyadic {
        let ginf = gxx_asymptote(&self.y1);
        let dy = self.contrast;
        Dyadic::new(
            C64::new(1.0, 0.0),
            -dy.zx * ginf,
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0) - dy.xx * ginf,
        )
    }

    pub fn contrast(&self) -> Dyadic {
        self.contrast
    }

    pub fn y1(&self) -> Dyadic {
        self.y1
    }
}
