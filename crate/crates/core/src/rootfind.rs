//! Complex root search for the dispersion residual.
//!
//! The outer loop samples the residual on a circle, builds a Thiele
//! continued fraction through the samples, converts it to `P/Q` and moves to
//! the zero of `P` nearest the current center. Muller iteration on the true
//! residual finishes the job. Bound searches first look for a sign change of
//! the (phase-aligned) residual along the real axis.
//!
//! A seed below the real axis confines every sample and iterate to
//! `Im z < 0`. Leaky residuals are integrated along the real axis, and once
//! a surface-wave pole crosses that path the residual above the axis is a
//! different function.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MullerConfig {
    /// Stop when a step is below `tol * max(1, |z|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial spread of the three starting points, relative to `max(1, |seed|)`.
    pub step: f64,
    /// Shorten steps that would reach `Im z >= 0`.
    pub lower_half_plane: bool,
}

impl Default for MullerConfig {
    fn default() -> Self {
        Self { tol: 1e-13, max_iter: 60, step: 1e-3, lower_half_plane: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MullerResult {
    pub root: C64,
    pub residual: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Muller iteration from `seed`; returns the best iterate seen.
pub fn muller<F>(f: &F, seed: C64, cfg: MullerConfig) -> Result<MullerResult>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut h = cfg.step * seed.norm().max(1.0);
    if cfg.lower_half_plane {
        h = h.min(-0.5 * seed.im);
    }
    muller_from(f, [seed - h, seed + h, seed], None, cfg)
}

fn muller_from<F>(f: &F, start: [C64; 3], f_last: Option<C64>, cfg: MullerConfig) -> Result<MullerResult>
where
    F: Fn(C64) -> Result<C64>,
{
    let [mut x0, mut x1, mut x2] = start;
    let mut evaluations = 0;
    let mut eval = |z: C64| -> Result<C64> {
        evaluations += 1;
        let v = f(z)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(z))
        }
    };
    let mut f0 = eval(x0)?;
    let mut f1 = eval(x1)?;
    let mut f2 = match f_last {
        Some(v) => v,
        None => eval(x2)?,
    };
    let mut best = (x2, f2.norm());
    for (x, v) in [(x0, f0), (x1, f1)] {
        if v.norm() < best.1 {
            best = (x, v.norm());
        }
    }
    for it in 1..=cfg.max_iter {
        if f2.norm() == 0.0 {
            return Ok(MullerResult { root: x2, residual: 0.0, iterations: it - 1, evaluations });
        }
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        let d1 = (f1 - f0) / h1;
        let d2 = (f2 - f1) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * a * f2).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
        let mut dx = if den.norm() == 0.0 {
            // flat quadratic: nudge
            h2 * 0.5 + C64::new(0.0, 1.0) * h2.norm() * 0.5
        } else {
            -2.0 * f2 / den
        };
        // keep the step bounded relative to the stencil
        let span = h1.norm().max(h2.norm());
        if dx.norm() > 100.0 * span.max(1e-3 * x2.norm().max(1.0)) {
            dx *= 100.0 * span.max(1e-3 * x2.norm().max(1.0)) / dx.norm();
        }
        if cfg.lower_half_plane {
            while (x2 + dx).im >= 0.0 && dx.norm() > 0.0 {
                dx *= 0.5;
            }
        }
        let mut x3 = x2 + dx;
        let mut f3 = None;
        for _ in 0..8 {
            match eval(x3) {
                Ok(v) => {
                    f3 = Some(v);
                    break;
                }
                Err(_) => {
                    dx *= 0.5;
                    x3 = x2 + dx;
                }
            }
        }
        let Some(f3) = f3 else {
            return Err(Error::Stagnation { best: best.0, residual: best.1 });
        };
        if f3.norm() < best.1 {
            best = (x3, f3.norm());
        }
        let converged = dx.norm() <= cfg.tol * x3.norm().max(1.0);
        (x0, x1, x2) = (x1, x2, x3);
        (f0, f1, f2) = (f1, f2, f3);
        if converged {
            return Ok(MullerResult { root: best.0, residual: best.1, iterations: it, evaluations });
        }
    }
    Err(Error::Stagnation { best: best.0, residual: best.1 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSearchConfig {
    pub seed: C64,
    /// Half-widths `(d_beta, d_alpha)` of the search box around the seed.
    pub window: (f64, f64),
    pub pade_samples: usize,
    /// Numerator and denominator degrees.
    pub pade_order: (usize, usize),
    pub tol: f64,
    pub max_outer: usize,
    /// Look for a sign change on the real axis before going complex.
    pub real_axis_first: bool,
    /// Muller polishing iterations.
    pub polish_iter: usize,
}

impl Default for RootSearchConfig {
    fn default() -> Self {
        Self {
            seed: C64::new(1.5, 0.0),
            window: (0.3, 0.3),
            pade_samples: 8,
            pade_order: (3, 3),
            tol: 1e-10,
            max_outer: 12,
            real_axis_first: false,
            polish_iter: 40,
        }
    }
}

impl RootSearchConfig {
    pub fn with_seed(seed: C64) -> Self {
        Self { seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let (p, q) = self.pade_order;
        if self.pade_samples < p + q + 1 {
            return Err(Error::Config(format!(
                "pade_samples ({}) must be at least numerator + denominator + 1 ({})",
                self.pade_samples,
                p + q + 1
            )));
        }
        if !(self.window.0 > 0.0) || !(self.window.1 >= 0.0) {
            return Err(Error::Config("window half-widths must be positive".into()));
        }
        if !(self.tol > 0.0) || !self.seed.is_finite() {
            return Err(Error::Config("tol must be positive and seed finite".into()));
        }
        Ok(())
    }

    fn in_window(&self, z: C64, factor: f64) -> bool {
        let d = z - self.seed;
        let wa = if self.window.1 > 0.0 { self.window.1 } else { self.window.0 };
        d.re.abs() <= factor * self.window.0 && d.im.abs() <= factor * wa
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootMethod {
    /// Sign change on the real axis, refined by Illinois iteration.
    RealBracket,
    /// Padé outer loop plus Muller polish.
    Pade,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootReport {
    pub root: C64,
    /// `|residual(root)|`.
    pub residual: f64,
    /// Center produced by the rational-interpolation stage, before polishing.
    pub pade_root: C64,
    pub pade_residual: f64,
    pub outer_iterations: usize,
    pub evaluations: usize,
    pub method: RootMethod,
    pub converged: bool,
    /// Filled in by callers that own a MoM system.
    pub sigma_min: Option<f64>,
}

/// Rational interpolant in Thiele continued-fraction form.
struct Thiele {
    nodes: Vec<C64>,
    coef: Vec<C64>,
}

impl Thiele {
    /// Builds through `(z_i, f_i)`; stops early if an inverse difference
    /// blows up, which lowers the order.
    fn new(z: &[C64], f: &[C64]) -> Self {
        let n = z.len();
        let mut rho: Vec<C64> = f.to_vec();
        let mut coef = vec![rho[0]];
        let mut nodes = vec![z[0]];
        for k in 1..n {
            let mut next = vec![C64::new(0.0, 0.0); n];
            let mut ok = true;
            for i in k..n {
                let den = rho[i] - coef[k - 1];
                if den.norm() <= 1e-14 * rho[i].norm().max(coef[k - 1].norm()).max(1e-300) {
                    ok = false;
                    break;
                }
                next[i] = (z[i] - z[k - 1]) / den;
            }
            if !ok {
                break;
            }
            rho = next;
            coef.push(rho[k]);
            nodes.push(z[k]);
            if !rho[k].is_finite() {
                coef.pop();
                nodes.pop();
                break;
            }
        }
        Self { nodes, coef }
    }

    /// `(P, Q)` coefficients, lowest degree first.
    fn to_polynomials(&self) -> (Vec<C64>, Vec<C64>) {
        let n = self.coef.len();
        let mut p = vec![self.coef[n - 1]];
        let mut q = vec![C64::new(1.0, 0.0)];
        for k in (0..n - 1).rev() {
            // a_k + (z - z_k) Q / P
            let zk = self.nodes[k];
            let mut np = poly_scale(&p, self.coef[k]);
            let shifted = poly_mul_linear(&q, zk);
            poly_add_assign(&mut np, &shifted);
            q = p;
            p = np;
        }
        (p, q)
    }
}

fn poly_scale(p: &[C64], s: C64) -> Vec<C64> {
    p.iter().map(|c| c * s).collect()
}

/// `p(z) * (z - r)`.
fn poly_mul_linear(p: &[C64], r: C64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c * r;
    }
    out
}

fn poly_add_assign(a: &mut Vec<C64>, b: &[C64]) {
    if a.len() < b.len() {
        a.resize(b.len(), C64::new(0.0, 0.0));
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn poly_eval(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// All roots of `p` by Aberth iteration.
pub fn poly_roots(p: &[C64]) -> Vec<C64> {
    let mut p: Vec<C64> = p.to_vec();
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while p.len() > 1 && p.last().unwrap().norm() <= 1e-14 * scale {
        p.pop();
    }
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = *p.last().unwrap();
    let monic: Vec<C64> = p.iter().map(|c| c / lead).collect();
    let dp: Vec<C64> = monic.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    // Cauchy bound for the initial circle
    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / deg as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let pv = poly_eval(&monic, z[i]);
            let dv = poly_eval(&dp, z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let s: C64 = (0..deg).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// One rational-interpolation step: samples on a circle of radius `r`
/// around `center` and returns the interpolant zero nearest the center.
fn pade_step<F>(f: &F, center: C64, r: f64, cfg: &RootSearchConfig, evals: &mut usize) -> Result<Option<C64>>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let n = cfg.pade_samples;
    let zs: Vec<C64> = (0..n).map(|i| C64::from_polar(1.0, 2.0 * PI * i as f64 / n as f64 + 0.1)).collect();
    let vals: Vec<Result<C64>> = zs.par_iter().map(|u| f(center + u * r)).collect();
    *evals += n;
    let mut us = Vec::with_capacity(n);
    let mut fs = Vec::with_capacity(n);
    for (u, v) in zs.iter().zip(vals) {
        if let Ok(v) = v {
            if v.is_finite() {
                us.push(*u);
                fs.push(v);
            }
        }
    }
    if us.len() < 3 {
        return Err(Error::NonFinite(center));
    }
    let (p_deg, q_deg) = cfg.pade_order;
    let m = us.len().min(p_deg + q_deg + 1);
    let fscale = fs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let fsn: Vec<C64> = fs.iter().map(|v| v / fscale).collect();
    let th = Thiele::new(&us[..m], &fsn[..m]);
    let (p, q) = th.to_polynomials();
    let qscale = q.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
    let pscale = p.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
    let mut best: Option<C64> = None;
    for u in poly_roots(&p) {
        if !u.is_finite() {
            continue;
        }
        // skip Froissart doublets: zeros cancelled by nearby poles
        let qv = poly_eval(&q, u).norm() / qscale;
        let dp = poly_eval(&poly_derivative(&p), u).norm() / pscale;
        if qv < 1e-8 && dp < 1e-6 {
            continue;
        }
        if best.map_or(true, |b| u.norm() < b.norm()) {
            best = Some(u);
        }
    }
    Ok(best.map(|u| center + u * r))
}

fn poly_derivative(p: &[C64]) -> Vec<C64> {
    p.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
}

/// Real-axis scan: returns a bracketed root nearest the seed, if any.
fn real_bracket<F>(f: &F, cfg: &RootSearchConfig, evals: &mut usize) -> Option<(f64, f64)>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let n = 41;
    let lo = cfg.seed.re - cfg.window.0;
    let hi = cfg.seed.re + cfg.window.0;
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let vals: Vec<Option<C64>> = xs.par_iter().map(|&x| f(C64::new(x, 0.0)).ok().filter(|v| v.is_finite())).collect();
    *evals += n;
    // align the phase with the largest sample
    let peak = vals.iter().flatten().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    let rot = peak.conj() / peak.norm();
    let proj: Vec<Option<f64>> = vals.iter().map(|v| v.map(|v| (v * rot).re)).collect();
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..n - 1 {
        if let (Some(a), Some(b)) = (proj[i], proj[i + 1]) {
            if a * b <= 0.0 {
                let mid = 0.5 * (xs[i] + xs[i + 1]);
                let d = (mid - cfg.seed.re).abs();
                if best.map_or(true, |(_, _, bd)| d < bd) {
                    best = Some((xs[i], xs[i + 1], d));
                }
            }
        }
    }
    best.map(|(a, b, _)| (a, b))
}

/// Illinois refinement of a real bracket on the phase-aligned residual.
fn refine_bracket<F>(f: &F, mut a: f64, mut b: f64, tol: f64, evals: &mut usize) -> Result<(f64, C64)>
where
    F: Fn(C64) -> Result<C64>,
{
    let fa_c = f(C64::new(a, 0.0))?;
    let fb_c = f(C64::new(b, 0.0))?;
    *evals += 2;
    let peak = if fa_c.norm() > fb_c.norm() { fa_c } else { fb_c };
    let rot = peak.conj() / peak.norm().max(1e-300);
    let g = |v: C64| (v * rot).re;
    let (mut fa, mut fb) = (g(fa_c), g(fb_c));
    let mut best = if fa.abs() < fb.abs() { (a, fa_c) } else { (b, fb_c) };
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= tol * b.abs().max(1.0) {
            break;
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !x.is_finite() || x <= a.min(b) || x >= a.max(b) {
            x = 0.5 * (a + b);
        }
        let fx_c = f(C64::new(x, 0.0))?;
        *evals += 1;
        let fx = g(fx_c);
        if fx_c.norm() < best.1.norm() {
            best = (x, fx_c);
        }
        if fx == 0.0 {
            return Ok((x, fx_c));
        }
        if fx * fb < 0.0 {
            a = b;
            fa = fb;
            b = x;
            fb = fx;
            side = 0;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Ok(best)
}

/// Brackets a near-real complex root on the real axis, when the residual
/// changes sign across it.
fn snap_to_real<F>(f: &F, z: C64, tol: f64, evals: &mut usize) -> Option<(f64, C64)>
where
    F: Fn(C64) -> Result<C64>,
{
    let d = (1e-7 * z.re.abs().max(1.0)).max(1e3 * z.im.abs());
    let (a, b) = (z.re - d, z.re + d);
    let fa = f(C64::new(a, 0.0)).ok()?;
    let fb = f(C64::new(b, 0.0)).ok()?;
    *evals += 2;
    let peak = if fa.norm() > fb.norm() { fa } else { fb };
    let rot = peak.conj() / peak.norm().max(1e-300);
    if (fa * rot).re * (fb * rot).re > 0.0 {
        return None;
    }
    refine_bracket(f, a, b, tol, evals).ok()
}

/// Locates a zero of `residual` near `cfg.seed`.
pub fn find_root<F>(residual: &F, cfg: &RootSearchConfig) -> Result<RootReport>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    cfg.validate()?;
    let mut evals = 0usize;

    if cfg.real_axis_first {
        if let Some((a, b)) = real_bracket(residual, cfg, &mut evals) {
            let (x, v) = refine_bracket(residual, a, b, cfg.tol, &mut evals)?;
            let root = C64::new(x, 0.0);
            return Ok(RootReport {
                root,
                residual: v.norm(),
                pade_root: root,
                pade_residual: v.norm(),
                outer_iterations: 0,
                evaluations: evals,
                method: RootMethod::RealBracket,
                converged: true,
                sigma_min: None,
            });
        }
        log::info!("no real sign change around {}; falling back to complex search", cfg.seed);
    }

    let lower = cfg.seed.im < 0.0;
    let mut center = cfg.seed;
    let mut r = 0.5 * cfg.window.0.min(if cfg.window.1 > 0.0 { cfg.window.1 } else { cfg.window.0 });
    let r_floor = 1e-6 * center.norm().max(1.0);
    let mut outer = 0;
    let mut last_step = f64::INFINITY;
    let mut stalls = 0;
    for it in 1..=cfg.max_outer {
        outer = it;
        let r_eff = if lower { r.min(-0.9 * center.im) } else { r };
        let next = pade_step(residual, center, r_eff, cfg, &mut evals)?;
        let Some(mut next) = next else {
            return Err(Error::NoRoot { center });
        };
        if lower && next.im >= 0.0 {
            next.im = 0.5 * center.im;
        }
        log::debug!("pade step {it}: {center} -> {next} (r = {r:.3e})");
        if !cfg.in_window(next, 3.0) {
            return Err(Error::NoRoot { center: cfg.seed });
        }
        let step = (next - center).norm();
        center = next;
        if step < cfg.tol * center.norm().max(1.0) {
            break;
        }
        if step >= 0.5 * last_step {
            stalls += 1;
        }
        last_step = step;
        // sample radius follows the step, bounded below by the noise floor
        r = (2.0 * step).clamp(r_floor, r);
        if r <= r_floor && step < 1e-6 * center.norm().max(1.0) {
            break;
        }
        if stalls >= 4 {
            break;
        }
    }
    let pade_root = center;
    let pv = residual(pade_root)?;
    evals += 1;
    let mcfg = MullerConfig {
        tol: cfg.tol.min(1e-12),
        max_iter: cfg.polish_iter,
        step: 1e-4 * r.max(r_floor),
        lower_half_plane: lower,
    };
    let mut h = (r * 1e-2).max(r_floor);
    if lower {
        h = h.min(-0.5 * pade_root.im);
    }
    let polished = muller_from(residual, [pade_root - h, pade_root + h, pade_root], Some(pv), mcfg);
    let (root, res, converged) = match polished {
        Ok(m) => {
            evals += m.evaluations;
            (m.root, m.residual, true)
        }
        Err(Error::Stagnation { best, residual: rv }) => (best, rv, false),
        Err(e) => return Err(e),
    };
    // polishing must not worsen the residual
    let (root, res) = if res <= pv.norm() { (root, res) } else { (pade_root, pv.norm()) };
    if !cfg.in_window(root, 3.0) {
        return Err(Error::NoRoot { center: cfg.seed });
    }
    // centers jittering at the residual's noise floor are settled, not oscillating
    let jitter = last_step <= 1e-5 * root.norm().max(1.0);
    if !converged && stalls >= 4 && !jitter {
        return Err(Error::Stagnation { best: root, residual: res });
    }
    if cfg.real_axis_first && root.im.abs() <= 1e-8 * root.norm().max(1.0) {
        if let Some((x, v)) = snap_to_real(residual, root, cfg.tol, &mut evals) {
            let root = C64::new(x, 0.0);
            return Ok(RootReport {
                root,
                residual: v.norm(),
                pade_root,
                pade_residual: pv.norm(),
                outer_iterations: outer,
                evaluations: evals,
                method: RootMethod::RealBracket,
                converged: true,
                sigma_min: None,
            });
        }
    }
    Ok(RootReport {
        root,
        residual: res,
        pade_root,
        pade_residual: pv.norm(),
        outer_iterations: outer,
        evaluations: evals,
        method: RootMethod::Pade,
        converged,
        sigma_min: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepStatus {
    Ok,
    /// Solved but the step exceeded ten times the secant prediction.
    Jump,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param: f64,
    pub root: Option<C64>,
    pub report: Option<RootReport>,
    pub status: SweepStatus,
}

impl SweepPoint {
    pub fn is_ok(&self) -> bool {
        !matches!(self.status, SweepStatus::Failed(_))
    }
}

/// Continues a root along `grid`. `solve(param, cfg)` performs one search;
/// each point is seeded by linear extrapolation from the last two
/// successes. A missed point is retried with 4x and 16x wider search
/// boxes; points that still fail are recorded and skipped.
pub fn sweep<S>(grid: &[f64], cfg0: &RootSearchConfig, solve: S) -> Result<Vec<SweepPoint>>
where
    S: Fn(f64, &RootSearchConfig) -> Result<RootReport>,
{
    let mut out: Vec<SweepPoint> = Vec::with_capacity(grid.len());
    let mut hist: Vec<(f64, C64)> = Vec::new();
    for (i, &p) in grid.iter().enumerate() {
        let mut cfg = *cfg0;
        let mut predicted_step = None;
        match hist.len() {
            0 => {}
            1 => cfg.seed = hist[0].1,
            _ => {
                let (p1, z1) = hist[hist.len() - 2];
                let (p2, z2) = hist[hist.len() - 1];
                let slope = (z2 - z1) / (p2 - p1);
                let mut seed = z2 + slope * (p - p2);
                if cfg0.seed.im < 0.0 && seed.im >= 0.0 {
                    seed.im = 0.5 * z2.im.min(0.0);
                }
                predicted_step = Some((seed - z2).norm());
                cfg.seed = seed;
                let grow = 2.0 * (seed - z2).norm();
                cfg.window = (cfg0.window.0.max(grow), cfg0.window.1.max(grow.min(cfg0.window.1 * 10.0)));
            }
        }
        if cfg.real_axis_first {
            cfg.seed.im = 0.0;
        }
        // a miss is retried with wider boxes before the point is given up
        let mut attempt = solve(p, &cfg);
        if i > 0 {
            for grow in [4.0, 16.0] {
                if attempt.is_ok() {
                    break;
                }
                let wide = RootSearchConfig { window: (cfg.window.0 * grow, cfg.window.1 * grow), ..cfg };
                log::info!("sweep point {p}: retrying with window {:?}", wide.window);
                attempt = solve(p, &wide);
            }
        }
        match attempt {
            Ok(rep) => {
                let mut status = SweepStatus::Ok;
                if let (Some(step), Some(&(_, last))) = (predicted_step, hist.last()) {
                    if (rep.root - last).norm() > 10.0 * step.max(1e-6) {
                        status = SweepStatus::Jump;
                    }
                }
                hist.push((p, rep.root));
                out.push(SweepPoint { param: p, root: Some(rep.root), report: Some(rep), status });
            }
            Err(e) if i == 0 => return Err(Error::SweepStart(Box::new(e))),
            Err(e) => {
                log::warn!("sweep point {p} failed: {e}");
                out.push(SweepPoint { param: p, root: None, report: None, status: SweepStatus::Failed(e.to_string()) });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn quadratic_root() {
        let t = c(1.5, -0.1);
        let f = move |z: C64| Ok(z * z - t * t);
        let r = find_root(&f, &RootSearchConfig::with_seed(c(1.4, 0.0))).unwrap();
        assert!((r.root - t).norm() < 1e-12, "{}", r.root);
    }

    #[test]
    fn rational_test_function() {
        let t = 2.0 / 3f64.sqrt();
        let f = move |z: C64| Ok((z - t) * (z + 5.0));
        let cfg = RootSearchConfig { seed: c(1.1, 0.0), window: (0.3, 0.3), ..Default::default() };
        let r = find_root(&f, &cfg).unwrap();
        assert!((r.root - t).norm() < 1e-10);
        let cfg = RootSearchConfig { real_axis_first: true, ..cfg };
        let r = find_root(&f, &cfg).unwrap();
        assert_eq!(r.method, RootMethod::RealBracket);
        assert!((r.root - t).norm() < 1e-10);
    }

    #[test]
    fn meromorphic_residual() {
        let t = c(1.548, -0.111);
        let f = move |z: C64| Ok((z - t) * (z + 0.3).exp() / (z - c(3.0, 1.0)));
        let r = find_root(&f, &RootSearchConfig::with_seed(c(1.6, -0.05))).unwrap();
        assert!((r.root - t).norm() < 1e-11);
        assert!(r.residual <= r.pade_residual);
    }

    #[test]
    fn idempotent_at_root() {
        let t = c(2.2, -0.3);
        let f = move |z: C64| Ok((z - t) * (z * z + 1.0));
        let r1 = find_root(&f, &RootSearchConfig::with_seed(c(2.0, 0.0))).unwrap();
        let r2 = find_root(&f, &RootSearchConfig::with_seed(r1.root)).unwrap();
        assert!((r1.root - r2.root).norm() < 1e-10);
    }

    #[test]
    fn no_root_in_window() {
        let f = |z: C64| Ok(z - c(10.0, 0.0));
        let cfg = RootSearchConfig { seed: c(1.0, 0.0), window: (0.2, 0.2), ..Default::default() };
        assert!(matches!(find_root(&f, &cfg), Err(Error::NoRoot { .. })));
    }

    #[test]
    fn config_validation() {
        let cfg = RootSearchConfig { pade_samples: 6, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn muller_finds_simple_roots() {
        let f = |z: C64| Ok(z.powi(3) - 2.0);
        let r = muller(&f, c(1.0, 0.1), MullerConfig::default()).unwrap();
        assert!((r.root.powi(3) - 2.0).norm() < 1e-12);
    }

    #[test]
    fn polynomial_roots() {
        // (z-1)(z+2)(z-3j)
        let p = poly_mul_linear(&poly_mul_linear(&[c(1.0, 0.0), c(0.0, 0.0)][..1], c(1.0, 0.0)), c(-2.0, 0.0));
        let p = poly_mul_linear(&p, c(0.0, 3.0));
        let mut r = poly_roots(&p);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(0.0, 3.0)).norm() < 1e-12);
        assert!((r[2] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn thiele_interpolates() {
        let f = |z: C64| (z - 0.3) * (z + 2.0) / (z - c(0.0, 4.0));
        let zs: Vec<C64> = (0..7).map(|i| C64::from_polar(1.0, i as f64)).collect();
        let fs: Vec<C64> = zs.iter().map(|&z| f(z)).collect();
        let th = Thiele::new(&zs, &fs);
        let (p, q) = th.to_polynomials();
        for z in [c(0.2, 0.1), c(-0.5, 0.7)] {
            assert!((poly_eval(&p, z) / poly_eval(&q, z) - f(z)).norm() < 1e-10);
        }
    }

    #[test]
    fn sweep_tracks_and_records_failures() {
        let grid: Vec<f64> = (0..8).map(|i| i as f64 * 0.1).collect();
        let solve = |p: f64, cfg: &RootSearchConfig| {
            if (p - 0.4).abs() < 1e-12 {
                return Err(Error::NoRoot { center: cfg.seed });
            }
            let t = c(1.5 + p, -0.1 * p);
            let f = move |z: C64| Ok(z - t);
            find_root(&f, cfg)
        };
        let cfg = RootSearchConfig::with_seed(c(1.45, 0.0));
        let pts = sweep(&grid, &cfg, solve).unwrap();
        assert_eq!(pts.len(), 8);
        assert!(!pts[4].is_ok());
        for p in pts.iter().filter(|p| p.is_ok()) {
            assert!((p.root.unwrap() - c(1.5 + p.param, -0.1 * p.param)).norm() < 1e-9);
            assert_eq!(p.status, SweepStatus::Ok);
        }
        let bad = |_: f64, cfg: &RootSearchConfig| Err(Error::NoRoot { center: cfg.seed });
        assert!(matches!(sweep(&grid, &cfg, bad), Err(Error::SweepStart(_))));
    }
}
