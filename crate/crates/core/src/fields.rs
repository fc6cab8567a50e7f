//! Current and tangential-field reconstruction on `y = 0`.
//!
//! The field of the equivalent current is
//! `e(x) = (1/2pi) int G(k) j~(k) exp(-j k x) dk` with `G` the Green's
//! function of the extended `x < 0` plane. `G_xx` tends to `-1/Y1xx`; that
//! constant is split off and transformed back exactly, leaving an integrand
//! that decays like `1/k^2`. Beyond `|Re k| = K` (past every singularity) the
//! tails are rotated into the half-plane where `exp(-j k x)` decays.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::basis::{basis_spatial_all, BasisSpec};
use crate::green::{green_ee, gxx_asymptote, Sheet};
use crate::kernel::build_catalog;
use crate::model::StructureSpec;
use crate::mom::{assemble, residual_fn, MoMSystem};
use crate::quadrature::{integrate_segments, segments_for, QuadratureConfig, Segment};
use crate::rootfind::{find_root, RootReport, RootSearchConfig};
use crate::{Error, Result, C64, J};

/// Offset used for one-sided limits at the junction, in wavelengths. The
/// near-junction field carries slowly varying edge terms, so this has to be
/// small; at `1e-6` the limits are settled to about four digits.
pub const JUNCTION_OFFSET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x_over_lambda0: f64,
    pub e_x: C64,
    pub e_z: C64,
    /// Zero for `x < 0`.
    pub j_sx: C64,
    pub j_sz: C64,
    /// False when the quadrature missed its tolerance at this point.
    pub converged: bool,
}

/// A solved mode: wavenumber, basis and current coefficients.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub kz_hat: C64,
    pub sheet: Sheet,
    pub i_x: Vec<C64>,
    pub i_z: Vec<C64>,
    pub basis: BasisSpec,
    pub structure: StructureSpec,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub separation: f64,
    pub report: Option<RootReport>,
    pub qcfg: QuadratureConfig,
    pub samples: Option<Vec<FieldSample>>,
}

impl ModeSolution {
    /// Unnormalized solution from explicit coefficients.
    pub fn from_coefficients(
        structure: &StructureSpec,
        kz_hat: C64,
        basis: BasisSpec,
        i_x: Vec<C64>,
        i_z: Vec<C64>,
        qcfg: QuadratureConfig,
    ) -> Result<Self> {
        if i_x.len() != basis.n_x || i_z.len() != basis.n_z {
            return Err(Error::BadBasisSize("coefficient count does not match the basis".into()));
        }
        Ok(Self {
            kz_hat,
            sheet: Sheet::Proper,
            i_x,
            i_z,
            basis,
            structure: structure.clone(),
            sigma_min: f64::NAN,
            sigma_max: f64::NAN,
            separation: f64::NAN,
            report: None,
            qcfg,
            samples: None,
        })
    }

    /// Null-space currents of an assembled system, normalized to `e_z(0) = 1`.
    pub fn from_system(structure: &StructureSpec, sys: &MoMSystem, qcfg: QuadratureConfig) -> Result<Self> {
        let ns = sys.null_space_coefficients();
        let mut sol = Self::from_coefficients(structure, sys.kz_hat, sys.basis, ns.i_x, ns.i_z, qcfg)?;
        sol.sheet = sys.sheet;
        sol.sigma_min = ns.sigma_min;
        sol.sigma_max = ns.sigma_max;
        sol.separation = ns.separation;
        sol.normalize()?;
        Ok(sol)
    }

    pub fn is_zero(&self) -> bool {
        self.i_x.iter().chain(&self.i_z).all(|c| c.norm() == 0.0)
    }

    /// Scales the coefficients so that `e_z(0) = 1`; returns the factor used.
    pub fn normalize(&mut self) -> Result<C64> {
        if self.is_zero() {
            return Ok(C64::new(1.0, 0.0));
        }
        let (e, _) = self.field_at(0.0)?;
        let ez0 = e[1];
        if ez0.norm() == 0.0 || !ez0.is_finite() {
            return Err(Error::NonFinite(ez0));
        }
        let s = 1.0 / ez0;
        for c in self.i_x.iter_mut().chain(self.i_z.iter_mut()) {
            *c *= s;
        }
        self.samples = None;
        Ok(s)
    }

    /// Spectral current `(j~_x, j~_z)` at complex `k`.
    pub fn spectral_current(&self, k: C64) -> [C64; 2] {
        let a = self.basis.a;
        let den = k + J * a;
        let w = (k - J * a) / den;
        let base = J / den;
        let mut out = [C64::new(0.0, 0.0); 2];
        let mut p = base;
        for n in 0..self.basis.n_max() {
            if n < self.i_x.len() {
                out[0] += self.i_x[n] * p;
            }
            if n < self.i_z.len() {
                out[1] += self.i_z[n] * p;
            }
            p *= w;
        }
        out
    }

    /// Current `(j_sx, j_sz)` at `xhat >= 0`.
    pub fn current_at(&self, xhat: f64) -> Result<[C64; 2]> {
        let a = self.basis.a;
        let lx = basis_spatial_all(self.i_x.len(), a, xhat)?;
        let lz = basis_spatial_all(self.i_z.len(), a, xhat)?;
        let jx = self.i_x.iter().zip(&lx).map(|(c, l)| c * l).sum();
        let jz = self.i_z.iter().zip(&lz).map(|(c, l)| c * l).sum();
        Ok([jx, jz])
    }

    /// `(e_x, e_z)` at `xhat = k0 x` on `y = 0`, plus a convergence flag.
    pub fn field_at(&self, xhat: f64) -> Result<([C64; 2], bool)> {
        let y1 = *self.structure.y1.nominal();
        let kz = self.kz_hat;
        let ginf = gxx_asymptote(&y1);
        let catalog = build_catalog(&self.structure, kz, Some(self.basis.a), self.sheet);
        let nmax = self.basis.n_max().max(1) as f64;
        let kc = (catalog.max_abs_re() + 1.0).max(3.0).max(self.basis.a.norm() * nmax.sqrt());
        let mut breaks: Vec<f64> = vec![-kc];
        breaks.extend(catalog.near_axis(self.qcfg.proximity_threshold).into_iter().filter(|r| r.abs() < kc));
        breaks.push(kc);
        breaks.dedup();
        let dir = if xhat > 0.0 {
            -1.0
        } else if xhat < 0.0 {
            1.0
        } else {
            0.0
        };
        let structure = &self.structure;
        let sheet = self.sheet;
        let integrand = |s: f64, out: &mut [C64]| {
            let (k, dk) = if s > kc && dir != 0.0 {
                (C64::new(kc, dir * (s - kc)), J * dir)
            } else if s < -kc && dir != 0.0 {
                (C64::new(-kc, dir * (-kc - s)), -J * dir)
            } else {
                (C64::new(s, 0.0), C64::new(1.0, 0.0))
            };
            let Ok(g) = green_ee(&structure.y1, k, kz, sheet) else {
                out[0] = C64::new(0.0, 0.0);
                out[1] = C64::new(0.0, 0.0);
                return;
            };
            let [jx, jz] = self.spectral_current(k);
            let ph = (-J * k * xhat).exp() * dk / (2.0 * PI);
            out[0] = ((g.gxx - ginf) * jx + g.gxz * jz) * ph;
            out[1] = (g.gzx * jx + g.gzz * jz) * ph;
        };
        // far from the line the field is orders below its peak; judge it
        // against the current amplitude, not its own size
        let amp: f64 = self.i_x.iter().chain(&self.i_z).map(|c| c.norm()).sum::<f64>() * ginf.norm().max(1.0);
        let abs_tol = self.qcfg.abs_tol.max(1e-2 * self.qcfg.rel_tol * amp);
        let cfg = QuadratureConfig { parallel: false, abs_tol, ..self.qcfg };
        let segs = segments_for(&breaks, kc);
        // the tails of segments_for are re-scaled for the rotated decay
        let segs: Vec<Segment> = segs
            .into_iter()
            .map(|s| match s {
                Segment::LeftTail(b, _) => Segment::LeftTail(b, tail_scale(xhat, kc)),
                Segment::RightTail(a, _) => Segment::RightTail(a, tail_scale(xhat, kc)),
                other => other,
            })
            .collect();
        let r = integrate_segments(&integrand, 2, &segs, &cfg);
        let mut ex = r.value[0];
        let ez = r.value[1];
        if xhat >= 0.0 {
            let [jx, _] = self.current_at(xhat)?;
            let w = if xhat == 0.0 { 0.5 } else { 1.0 };
            ex += w * ginf * jx;
        }
        Ok(([ex, ez], r.converged))
    }
}

fn tail_scale(xhat: f64, kc: f64) -> f64 {
    if xhat == 0.0 {
        kc
    } else {
        (1.0 / xhat.abs()).clamp(1.0, kc)
    }
}

/// Solves for a mode and builds its normalized solution.
///
/// `basis` carries the sizes and the strategy; its coefficient is
/// re-resolved at every trial `kz` when the strategy depends on `kz`.
pub fn solve_mode(
    structure: &StructureSpec,
    basis: &BasisSpec,
    sheet: Sheet,
    qcfg: &QuadratureConfig,
    rcfg: &RootSearchConfig,
) -> Result<ModeSolution> {
    let f = residual_fn(structure, basis, sheet, qcfg);
    let mut report = find_root(&f, rcfg)?;
    let b = basis.refreshed(report.root, structure)?;
    let sys = assemble(structure, report.root, &b, sheet, qcfg)?;
    let mut sol = ModeSolution::from_system(structure, &sys, *qcfg)?;
    report.sigma_min = Some(sol.sigma_min);
    sol.report = Some(report);
    Ok(sol)
}

/// Current samples `(j_sx, j_sz)` on a grid of `xhat >= 0`.
pub fn current_profile(sol: &ModeSolution, xhat_grid: &[f64]) -> Result<Vec<[C64; 2]>> {
    xhat_grid.iter().map(|&x| sol.current_at(x)).collect()
}

/// Tangential field at `x / lambda0` grid points on the plane `y = 0`.
pub fn tangential_field(sol: &ModeSolution, x_grid: &[f64], y: f64) -> Result<Vec<FieldSample>> {
    if y != 0.0 {
        return Err(Error::NonzeroHeight);
    }
    let rows: Vec<Result<FieldSample>> = x_grid
        .par_iter()
        .map(|&xl| {
            let xhat = 2.0 * PI * xl;
            let ([ex, ez], ok) = sol.field_at(xhat)?;
            let [jx, jz] = if xhat >= 0.0 { sol.current_at(xhat)? } else { [C64::new(0.0, 0.0); 2] };
            if !ok {
                log::warn!("field quadrature did not converge at x/lambda0 = {xl}");
            }
            Ok(FieldSample { x_over_lambda0: xl, e_x: ex, e_z: ez, j_sx: jx, j_sz: jz, converged: ok })
        })
        .collect();
    rows.into_iter().collect()
}

/// Divides every field and current entry by `e_z` at the sample nearest to
/// `x = 0`. Applying it twice is the identity.
pub fn normalize_table(table: &mut [FieldSample]) -> Option<C64> {
    let r = table.iter().min_by(|a, b| a.x_over_lambda0.abs().total_cmp(&b.x_over_lambda0.abs()))?;
    let ez0 = r.e_z;
    if ez0.norm() == 0.0 || !ez0.is_finite() {
        return None;
    }
    let s = 1.0 / ez0;
    for r in table.iter_mut() {
        r.e_x *= s;
        r.e_z *= s;
        r.j_sx *= s;
        r.j_sz *= s;
    }
    Some(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `e_x(0+) / e_x(0-)`.
    pub jump_ratio: C64,
    /// `|e_z(0+) - e_z(0-)|`.
    pub ez_gap: f64,
    /// Largest `|e|` in the table for `|x| < 0.01 lambda0`.
    pub near_line_max: f64,
    /// Fitted decay rates of `|e|` in nepers per wavelength on `1 < |x| < 3`.
    pub decay_left: f64,
    pub decay_right: f64,
    /// Slope of the unwrapped phase of `e_z`, radians per wavelength.
    pub phase_slope_left: f64,
    pub phase_slope_right: f64,
    /// Largest deviation of `arg(e_x / e_z)` from +-90 degrees.
    pub quadrature_error_deg: f64,
}

impl Diagnostics {
    fn nan() -> Self {
        Self {
            jump_ratio: C64::new(f64::NAN, f64::NAN),
            ez_gap: f64::NAN,
            near_line_max: f64::NAN,
            decay_left: f64::NAN,
            decay_right: f64::NAN,
            phase_slope_left: f64::NAN,
            phase_slope_right: f64::NAN,
            quadrature_error_deg: f64::NAN,
        }
    }
}

fn linear_fit(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}

fn unwrap(phases: &mut [f64]) {
    for i in 1..phases.len() {
        let mut d = phases[i] - phases[i - 1];
        while d > PI {
            phases[i] -= 2.0 * PI;
            d -= 2.0 * PI;
        }
        while d < -PI {
            phases[i] += 2.0 * PI;
            d += 2.0 * PI;
        }
    }
}

/// Field diagnostics of a solution and its sampled table.
pub fn diagnostics(sol: &ModeSolution, table: &[FieldSample]) -> Diagnostics {
    if sol.is_zero() || table.iter().all(|r| r.e_x.norm() == 0.0 && r.e_z.norm() == 0.0) {
        return Diagnostics::nan();
    }
    let mut d = Diagnostics::nan();
    let xo = 2.0 * PI * JUNCTION_OFFSET;
    if let (Ok((p, _)), Ok((m, _))) = (sol.field_at(xo), sol.field_at(-xo)) {
        d.jump_ratio = p[0] / m[0];
        d.ez_gap = (p[1] - m[1]).norm();
    }
    d.near_line_max = table
        .iter()
        .filter(|r| r.x_over_lambda0.abs() < 0.01)
        .map(|r| r.e_x.norm().max(r.e_z.norm()))
        .fold(f64::NAN, f64::max);

    let mag = |r: &FieldSample| (r.e_x.norm_sqr() + r.e_z.norm_sqr()).sqrt();
    let mut sorted: Vec<&FieldSample> = table.iter().collect();
    sorted.sort_by(|a, b| a.x_over_lambda0.total_cmp(&b.x_over_lambda0));
    for right in [true, false] {
        let side: Vec<&&FieldSample> =
            sorted.iter().filter(|r| if right { r.x_over_lambda0 > 0.0 } else { r.x_over_lambda0 < 0.0 }).collect();
        let fit: Vec<(f64, f64)> = side
            .iter()
            .filter(|r| (1.0..=3.0).contains(&r.x_over_lambda0.abs()) && mag(r) > 0.0)
            .map(|r| (r.x_over_lambda0.abs(), mag(r).ln()))
            .collect();
        let rate = -linear_fit(&fit);
        let mut ph: Vec<f64> = side.iter().map(|r| r.e_z.arg()).collect();
        unwrap(&mut ph);
        let pts: Vec<(f64, f64)> = side.iter().zip(&ph).map(|(r, p)| (r.x_over_lambda0, *p)).collect();
        let slope = linear_fit(&pts);
        if right {
            d.decay_right = rate;
            d.phase_slope_right = slope;
        } else {
            d.decay_left = rate;
            d.phase_slope_left = slope;
        }
    }
    let peak = table.iter().map(|r| r.e_x.norm().max(r.e_z.norm())).fold(0.0, f64::max);
    d.quadrature_error_deg = table
        .iter()
        .filter(|r| r.e_x.norm() > 1e-6 * peak && r.e_z.norm() > 1e-6 * peak)
        .map(|r| ((r.e_x / r.e_z).arg().to_degrees().abs() - 90.0).abs())
        .fold(f64::NAN, f64::max);
    d
}

/// Relative L2 mismatch between `j_s` and `(Y2 - Y1) e` on `x/lambda0` in
/// `(lo, hi)`, sampled at `n` points.
pub fn reconstruction_error(sol: &ModeSolution, lo: f64, hi: f64, n: usize) -> Result<f64> {
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect();
    let table = tangential_field(sol, &grid, 0.0)?;
    let dy = *sol.structure.y2.nominal() - *sol.structure.y1.nominal();
    let mut num = 0.0;
    let mut den = 0.0;
    for r in &table {
        let [jz_pred, jx_pred] = dy.apply([r.e_z, r.e_x]);
        num += (jx_pred - r.j_sx).norm_sqr() + (jz_pred - r.j_sz).norm_sqr();
        den += r.j_sx.norm_sqr() + r.j_sz.norm_sqr();
    }
    Ok((num / den).sqrt())
}
