//! Double-exponential quadrature on the real line.
//!
//! Three maps are used: tanh-sinh on finite segments, exp-sinh on the two
//! semi-infinite tails and sinh-sinh on the whole line. When singularities
//! sit close to the real axis the line is cut at their real parts, so each
//! near-singularity ends up at a segment endpoint where the DE nodes
//! cluster.
//!
//! Every rule is refined by halving the step; each level only evaluates the
//! new (odd) nodes. Integrands are vector valued so one kernel evaluation
//! per node can serve many Toeplitz generators at once.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::kernel::SingularityCatalog;
use crate::{Error, Result, C64};

/// Half-width of the DE parameter range; weights beyond it are negligible.
const T_MAX: f64 = 4.0;
/// Levels always performed before the error estimate is trusted.
const MIN_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Target relative error of the result (max norm over components).
    pub rel_tol: f64,
    /// Absolute error accepted regardless of the result's size.
    pub abs_tol: f64,
    /// Maximum number of step halvings.
    pub max_levels: usize,
    /// Length scale of the infinite maps; `0` picks it from the problem.
    pub truncation: f64,
    /// Singularities closer than this to the axis split the line.
    pub proximity_threshold: f64,
    /// Evaluate the nodes of a level on the rayon pool.
    pub parallel: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_levels: 10,
            truncation: 0.0,
            proximity_threshold: 0.5,
            parallel: true,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 1e-14 && self.rel_tol < 1e-2) {
            return Err(Error::Config(format!("rel_tol must lie in (1e-14, 1e-2), got {}", self.rel_tol)));
        }
        if self.max_levels > 14 {
            return Err(Error::Config(format!("max_levels must be <= 14, got {}", self.max_levels)));
        }
        if !(self.proximity_threshold >= 0.0) || !(self.truncation >= 0.0) {
            return Err(Error::Config("proximity_threshold and truncation must be >= 0".into()));
        }
        Ok(())
    }
}

/// A piece of the real line with its DE map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// `[a, b]`, tanh-sinh.
    Finite(f64, f64),
    /// `(-inf, b]`, exp-sinh with scale.
    LeftTail(f64, f64),
    /// `[a, inf)`, exp-sinh with scale.
    RightTail(f64, f64),
    /// `(-inf, inf)`, sinh-sinh with scale.
    Whole(f64),
}

impl Segment {
    /// Node and weight at parameter `t`, or `None` if the node collapsed
    /// onto an endpoint.
    #[inline]
    fn node(&self, t: f64) -> Option<(f64, f64)> {
        let s = FRAC_PI_2 * t.sinh();
        let ds = FRAC_PI_2 * t.cosh();
        match *self {
            Segment::Finite(a, b) => {
                let m = 0.5 * (b - a);
                // distance from the nearer endpoint, in units of m
                let e = (-2.0 * s.abs()).exp();
                let delta = 2.0 * e / (1.0 + e);
                let w = m * ds * 4.0 * e / ((1.0 + e) * (1.0 + e));
                let x = if t >= 0.0 { b - m * delta } else { a + m * delta };
                if m * delta == 0.0 || !w.is_finite() {
                    return None;
                }
                Some((x, w))
            }
            Segment::RightTail(a, l) => {
                let e = s.exp();
                let x = a + l * e;
                let w = l * ds * e;
                (l * e > 0.0 && x.is_finite() && w.is_finite()).then_some((x, w))
            }
            Segment::LeftTail(b, l) => {
                let e = s.exp();
                let x = b - l * e;
                let w = l * ds * e;
                (l * e > 0.0 && x.is_finite() && w.is_finite()).then_some((x, w))
            }
            Segment::Whole(l) => {
                let x = l * s.sinh();
                let w = l * ds * s.cosh();
                (x.is_finite() && w.is_finite()).then_some((x, w))
            }
        }
    }
}

/// Splits the line at `breaks` (sorted, distinct).
pub fn segments_for(breaks: &[f64], scale: f64) -> Vec<Segment> {
    if breaks.is_empty() {
        return vec![Segment::Whole(scale)];
    }
    let mut out = Vec::with_capacity(breaks.len() + 1);
    out.push(Segment::LeftTail(breaks[0], scale));
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            out.push(Segment::Finite(w[0], w[1]));
        }
    }
    out.push(Segment::RightTail(*breaks.last().unwrap(), scale));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    /// Estimated absolute error (max norm over components).
    pub error: f64,
    pub levels: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Error estimate after each level from the second one on.
    pub history: Vec<f64>,
    /// Last-level correction per component.
    pub component_errors: Vec<f64>,
}

fn max_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrates a vector-valued function over a union of segments.
///
/// `f(x, out)` must fill `out` (length `dim`) with the integrand at `x`.
/// Node evaluations within a level may run concurrently; the reduction is
/// sequential in node order so results are bit-reproducible.
pub fn integrate_segments<F>(f: &F, dim: usize, segments: &[Segment], cfg: &QuadratureConfig) -> QuadResult<Vec<C64>>
where
    F: Fn(f64, &mut [C64]) + Sync,
{
    let nseg = segments.len();
    let mut sums = vec![vec![C64::new(0.0, 0.0); dim]; nseg];
    let mut frozen = vec![false; nseg];
    let mut evaluations = 0usize;
    let mut history = Vec::new();
    let mut error = f64::INFINITY;
    let mut levels = 0;
    let mut total = vec![C64::new(0.0, 0.0); dim];
    let mut converged = false;
    let mut component_errors = vec![f64::INFINITY; dim];

    for level in 0..=cfg.max_levels {
        let h = 1.0 / (1u64 << level) as f64;
        // nodes of this level: all k at level 0, odd k afterwards
        let kmax = (T_MAX / h).floor() as i64;
        let mut nodes: Vec<(usize, f64, f64)> = Vec::new();
        for (si, seg) in segments.iter().enumerate() {
            if frozen[si] {
                continue;
            }
            let mut k = -kmax;
            while k <= kmax {
                if level == 0 || k.rem_euclid(2) == 1 {
                    if let Some((x, w)) = seg.node(k as f64 * h) {
                        nodes.push((si, x, w));
                    }
                }
                k += 1;
            }
        }
        let mut buf = vec![C64::new(0.0, 0.0); nodes.len() * dim];
        if cfg.parallel && nodes.len() > 16 {
            buf.par_chunks_mut(dim.max(1)).zip(nodes.par_iter()).for_each(|(out, &(_, x, _))| f(x, out));
        } else {
            for (out, &(_, x, _)) in buf.chunks_mut(dim.max(1)).zip(nodes.iter()) {
                f(x, out);
            }
        }
        evaluations += nodes.len();

        let mut level_sums = vec![vec![C64::new(0.0, 0.0); dim]; nseg];
        for (i, &(si, _, w)) in nodes.iter().enumerate() {
            let vals = &buf[i * dim..(i + 1) * dim];
            let acc = &mut level_sums[si];
            for (a, v) in acc.iter_mut().zip(vals) {
                if v.is_finite() {
                    *a += *v * w;
                }
            }
        }
        let mut corrections = vec![0.0; nseg];
        let mut comp = vec![0.0; dim];
        for si in 0..nseg {
            if frozen[si] {
                continue;
            }
            let new: Vec<C64> = if level == 0 {
                level_sums[si].iter().map(|v| v * h).collect()
            } else {
                sums[si].iter().zip(&level_sums[si]).map(|(old, add)| old * 0.5 + add * h).collect()
            };
            let mut diff = 0.0f64;
            for (j, (a, b)) in new.iter().zip(&sums[si]).enumerate() {
                let e = (a - b).norm();
                comp[j] += e;
                diff = diff.max(e);
            }
            corrections[si] = diff;
            sums[si] = new;
        }
        total = vec![C64::new(0.0, 0.0); dim];
        for s in &sums {
            for (t, v) in total.iter_mut().zip(s) {
                *t += v;
            }
        }
        levels = level;
        component_errors = comp;
        if level == 0 {
            continue;
        }
        error = corrections.iter().sum();
        history.push(error);
        let target = (cfg.rel_tol * max_norm(&total)).max(cfg.abs_tol);
        if level >= MIN_LEVELS {
            if error <= target {
                converged = true;
                break;
            }
            for si in 0..nseg {
                if !frozen[si] && corrections[si] <= 0.01 * target / nseg as f64 {
                    frozen[si] = true;
                }
            }
        }
    }
    QuadResult { value: total, error, levels, evaluations, converged, history, component_errors }
}

/// Scale for the infinite maps.
pub fn auto_scale(cfg: &QuadratureConfig, hint: f64) -> f64 {
    if cfg.truncation > 0.0 {
        cfg.truncation
    } else {
        hint.max(1.0)
    }
}

/// Vector integral over the real line, split at near-axis singularities.
pub fn integrate_real_line_vec<F>(
    f: &F,
    dim: usize,
    cfg: &QuadratureConfig,
    catalog: Option<&SingularityCatalog>,
    scale_hint: f64,
) -> QuadResult<Vec<C64>>
where
    F: Fn(f64, &mut [C64]) + Sync,
{
    let breaks = catalog.map(|c| c.near_axis(cfg.proximity_threshold)).unwrap_or_default();
    let segs = segments_for(&breaks, auto_scale(cfg, scale_hint));
    integrate_segments(f, dim, &segs, cfg)
}

/// Scalar integral over the real line; errors when the tolerance is missed.
pub fn integrate_real_line<F>(f: F, cfg: &QuadratureConfig, catalog: Option<&SingularityCatalog>) -> Result<QuadResult<C64>>
where
    F: Fn(f64) -> C64 + Sync,
{
    cfg.validate()?;
    let g = |x: f64, out: &mut [C64]| out[0] = f(x);
    let r = integrate_real_line_vec(&g, 1, cfg, catalog, 1.0);
    let value = r.value[0];
    if !r.converged {
        return Err(Error::Quadrature { estimate: value, error: r.error, levels: r.levels });
    }
    Ok(QuadResult {
        value,
        error: r.error,
        levels: r.levels,
        evaluations: r.evaluations,
        converged: true,
        history: r.history,
        component_errors: r.component_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::SingularityKind;
    use crate::{c, J};
    use std::f64::consts::PI;

    fn rel(a: C64, b: f64) -> f64 {
        (a - b).norm() / b.abs()
    }

    #[test]
    fn lorentzian_whole_line() {
        let r = integrate_real_line(|k| c(1.0 / (1.0 + k * k), 0.0), &QuadratureConfig::default(), None).unwrap();
        assert!(rel(r.value, PI) < 1e-12, "{}", r.value);
    }

    #[test]
    fn gaussian_whole_line() {
        let r = integrate_real_line(|k| c((-k * k).exp(), 0.0), &QuadratureConfig::default(), None).unwrap();
        assert!(rel(r.value, PI.sqrt()) < 1e-12);
    }

    #[test]
    fn narrow_lorentzian_needs_segmentation() {
        let d = 1e-3;
        let cat = SingularityCatalog::default()
            .with_extra(SingularityKind::SurfaceWavePole, c(2.0, d))
            .with_extra(SingularityKind::SurfaceWavePole, c(2.0, -d));
        let f = move |k: f64| c(1.0 / ((k - 2.0).powi(2) + d * d), 0.0);
        let r = integrate_real_line(f, &QuadratureConfig::default(), Some(&cat)).unwrap();
        assert!(rel(r.value, PI / d) < 1e-8, "{}", r.value);
    }

    #[test]
    fn finite_segment_and_tails() {
        let cfg = QuadratureConfig::default();
        let g = |x: f64, out: &mut [C64]| out[0] = c(x * x, 0.0);
        let r = integrate_segments(&g, 1, &[Segment::Finite(0.0, 1.0)], &cfg);
        assert!(rel(r.value[0], 1.0 / 3.0) < 1e-13);
        let g = |x: f64, out: &mut [C64]| out[0] = c((-x).exp(), 0.0);
        let r = integrate_segments(&g, 1, &[Segment::RightTail(0.0, 1.0)], &cfg);
        assert!(rel(r.value[0], 1.0) < 1e-12);
        let g = |x: f64, out: &mut [C64]| out[0] = c(x.exp(), 0.0);
        let r = integrate_segments(&g, 1, &[Segment::LeftTail(0.0, 1.0)], &cfg);
        assert!(rel(r.value[0], 1.0) < 1e-12);
    }

    #[test]
    fn vector_components_share_nodes() {
        let cfg = QuadratureConfig::default();
        let g = |k: f64, out: &mut [C64]| {
            let base = 1.0 / (k * k + 0.25);
            let w = (c(k, 0.0) - J * 0.5) / (c(k, 0.0) + J * 0.5);
            out[0] = c(base, 0.0);
            out[1] = w * base;
            out[2] = w * w * base;
        };
        let r = integrate_real_line_vec(&g, 3, &cfg, None, 1.0);
        assert!(r.converged);
        assert!(rel(r.value[0], 2.0 * PI) < 1e-11);
        // Laguerre orthogonality in the Cayley variable
        assert!(r.value[1].norm() < 1e-10 && r.value[2].norm() < 1e-10);
    }

    #[test]
    fn nonconvergence_reports_estimate() {
        let cfg = QuadratureConfig { max_levels: 3, rel_tol: 1e-13, ..Default::default() };
        let f = |k: f64| c(1.0 / (k.abs() + 1e-9).sqrt() / (1.0 + k * k), 0.0);
        match integrate_real_line(f, &cfg, None) {
            Err(Error::Quadrature { estimate, error, .. }) => {
                assert!(estimate.norm() > 0.0 && error > 0.0);
            }
            other => panic!("expected quadrature error, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig { rel_tol: 1e-15, ..Default::default() }.validate().is_err());
        assert!(QuadratureConfig { max_levels: 15, ..Default::default() }.validate().is_err());
        assert!(QuadratureConfig::default().validate().is_ok());
    }

    #[test]
    fn deterministic_across_parallel_setting() {
        let f = |k: f64, out: &mut [C64]| out[0] = c((1.0 + k * k).recip(), (k / (2.0 + k * k)).sin());
        let a = integrate_real_line_vec(&f, 1, &QuadratureConfig::default(), None, 1.0);
        let b = integrate_real_line_vec(&f, 1, &QuadratureConfig { parallel: false, ..Default::default() }, None, 1.0);
        assert_eq!(a.value, b.value);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn linearity(al in -3.0..3.0f64, be in -3.0..3.0f64, s in 0.3..3.0f64, m in -2.0..2.0f64) {
                let cfg = QuadratureConfig::default();
                let f = move |k: f64| c(1.0 / (s * s + k * k), 0.0);
                let g = move |k: f64| c((-(k - m).powi(2)).exp(), (-(k * k)).exp() * k);
                let h = move |k: f64| f(k) * al + g(k) * be;
                let rf = integrate_real_line(f, &cfg, None).unwrap();
                let rg = integrate_real_line(g, &cfg, None).unwrap();
                let rh = integrate_real_line(h, &cfg, None).unwrap();
                let bound = rf.error * al.abs() + rg.error * be.abs() + rh.error + 1e-12 * (1.0 + rh.value.norm());
                prop_assert!((rh.value - (rf.value * al + rg.value * be)).norm() <= bound * 10.0);
            }

            #[test]
            fn segmented_agrees_with_unsegmented(p in -3.0..3.0f64, d in 1.2..3.0f64) {
                // poles farther than twice the threshold from the axis
                let f = move |k: f64| c(1.0, 0.0) / (c(k - p, 0.0).powi(2) + d * d);
                let cat = SingularityCatalog::default()
                    .with_extra(SingularityKind::SurfaceWavePole, c(p, d))
                    .with_extra(SingularityKind::SurfaceWavePole, c(p, -d));
                let wide = QuadratureConfig { proximity_threshold: 10.0, ..Default::default() };
                let a = integrate_real_line(f, &QuadratureConfig::default(), Some(&cat)).unwrap();
                let b = integrate_real_line(f, &wide, Some(&cat)).unwrap();
                prop_assert!((a.value - b.value).norm() <= 1e-9 * a.value.norm());
                prop_assert!(rel(a.value, PI / d) < 1e-10);
            }
        }
    }

    #[test]
    fn error_estimate_decreases_on_analytic_family() {
        for s in [0.5, 1.0, 2.0] {
            let g = move |k: f64, out: &mut [C64]| out[0] = c(1.0 / (s * s + k * k), 0.0);
            let cfg = QuadratureConfig { rel_tol: 1e-13, ..Default::default() };
            let r = integrate_real_line_vec(&g, 1, &cfg, None, 1.0);
            for w in r.history.windows(2).skip(1) {
                assert!(w[1] <= w[0] * 1.0001 + 1e-15, "{:?}", r.history);
            }
        }
    }
}
