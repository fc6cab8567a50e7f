//! Job execution: solve, sweep, field, sw and selftest.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use linewave::fields::{diagnostics, normalize_table, solve_mode, tangential_field};
use linewave::green::{uniform_sw_wavenumbers, Polarization};
use linewave::kernel::SingularityKind;
use linewave::quadrature::integrate_real_line;
use linewave::reference::{render_golden, run_fixture_suite};
use linewave::rootfind::{sweep, RootReport, SweepStatus};
use linewave::{c, BasisSpec, ModeSolution, Normalization, QuadratureConfig, SingularityCatalog, StructureSpec, C64};
use rayon::prelude::*;

use crate::config::{JobConfig, JobKind, SolverConfig, StructureConfig, SweepParam};
use crate::output::{fmt12, write_dispersion, write_field, DispersionRow};
use crate::plot;

/// What the caller needs to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    /// Some sweep points failed.
    pub partial: bool,
}

pub fn run(cfg: &JobConfig, out: &Path) -> anyhow::Result<Outcome> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let echo = serde_json::to_string_pretty(cfg)? + "\n";
    std::fs::write(out.join("effective_config.json"), echo).context("writing effective_config.json")?;
    let prefix = cfg.output.prefix.clone().unwrap_or_else(|| "linewave".into());
    let ctx = Ctx { cfg, out, prefix };
    match cfg.job.unwrap_or(JobKind::Solve) {
        JobKind::Solve | JobKind::Field => ctx.solve(),
        JobKind::Sweep => ctx.sweep(),
        JobKind::Sw => ctx.surface_waves(),
    }
}

struct Ctx<'a> {
    cfg: &'a JobConfig,
    out: &'a Path,
    prefix: String,
}

fn describe(kz: C64) -> String {
    let sign = if kz.im < 0.0 { '-' } else { '+' };
    format!("{:.10} {sign} j{:.10}", kz.re, kz.im.abs())
}

/// Largest real surface-wave wavenumber of either half-plane.
fn fastest_sw(s: &StructureSpec) -> Option<f64> {
    [&s.y1, &s.y2]
        .iter()
        .flat_map(|y| uniform_sw_wavenumbers(y))
        .filter(|w| w.kt.im.abs() <= 1e-12 * w.kt.re)
        .map(|w| w.kt.re)
        .fold(None, |m, k| Some(m.map_or(k, |m: f64| m.max(k))))
}

fn solve_at(
    s: &StructureSpec,
    solver: &SolverConfig,
    n: Option<usize>,
    rcfg: &linewave::RootSearchConfig,
) -> linewave::Result<ModeSolution> {
    let (nx, nz) = n.map_or((solver.n_x, solver.n_z), |n| (n, n));
    let strategy = solver.strategy().map_err(|e| linewave::Error::Config(e.to_string()))?;
    let basis = BasisSpec::new(nx, nz, strategy, rcfg.seed, s)?;
    solve_mode(s, &basis, solver.sheet(), &solver.quadrature(), rcfg)
}

impl Ctx<'_> {
    fn path(&self, suffix: &str) -> PathBuf {
        self.out.join(format!("{}{suffix}", self.prefix))
    }

    fn meters_per_lambda(&self) -> anyhow::Result<Option<f64>> {
        Ok(match self.cfg.frequency_hz {
            Some(hz) => Some(Normalization::from_frequency(hz)?.meters(2.0 * PI)),
            None => None,
        })
    }

    fn solve(&self) -> anyhow::Result<Outcome> {
        let s = self.cfg.structure.build()?;
        let solver = &self.cfg.solver;
        let sol = solve_at(&s, solver, None, &solver.root_config())?;
        let kz = sol.kz_hat;
        let mut line = format!("kz = {}, sigma_min = {:.3e}", describe(kz), sol.sigma_min);
        if kz.im.abs() <= 1e-9 * kz.norm() {
            match fastest_sw(&s) {
                Some(k) if kz.re > k => {
                    let _ = write!(line, " (bound: above the fastest surface wave {k:.10})");
                }
                Some(k) => {
                    let _ = write!(line, " (real, but below the surface wave {k:.10})");
                }
                None => line.push_str(" (real)"),
            }
        } else if kz.im < 0.0 {
            line.push_str(" (leaky, decaying along z)");
        } else {
            line.push_str(" (growing along z)");
        }
        if sol.separation > 0.1 {
            line.push_str(" [null space not well separated]");
        }
        println!("{line}");
        let row = DispersionRow {
            param: 0.0,
            beta: Some(kz.re),
            alpha: Some(-kz.im),
            sigma_min: Some(sol.sigma_min),
            status: "ok".into(),
        };
        write_dispersion(&self.path("_root.csv"), std::slice::from_ref(&row))?;
        if self.cfg.output.plot {
            let svg = plot::dispersion_svg(&[(self.prefix.clone(), vec![row])], "param")?;
            std::fs::write(self.path("_root.svg"), svg)?;
        }
        if let Some(f) = &self.cfg.field {
            let mut table = tangential_field(&sol, &f.grid(), f.y)?;
            if f.normalize && normalize_table(&mut table).is_none() {
                log::warn!("e_z vanishes near the junction; field left unnormalized");
            }
            let d = diagnostics(&sol, &table);
            println!(
                "field: {} points, e_x jump ratio {}, e_z gap {:.3e}, quadrature error {:.3} deg",
                table.len(),
                describe(d.jump_ratio),
                d.ez_gap,
                d.quadrature_error_deg
            );
            if table.iter().any(|r| !r.converged) {
                log::warn!("some field samples missed the quadrature tolerance");
            }
            write_field(&self.path("_field.csv"), &table)?;
            if self.cfg.output.plot {
                std::fs::write(self.path("_field.svg"), plot::field_svg(&table, self.meters_per_lambda()?)?)?;
            }
        }
        Ok(Outcome { partial: false })
    }

    fn sweep(&self) -> anyhow::Result<Outcome> {
        let Some(sw) = &self.cfg.sweep else { bail!("missing sweep block") };
        let solver = &self.cfg.solver;
        let curves: Vec<(String, StructureConfig, C64)> = if sw.curves.is_empty() {
            vec![(self.prefix.clone(), self.cfg.structure.clone(), solver.seed)]
        } else {
            sw.curves.iter().map(|c| (c.label.clone(), c.structure.clone(), c.seed.unwrap_or(solver.seed))).collect()
        };
        let param = sw.parameter;
        let results: Vec<anyhow::Result<Vec<DispersionRow>>> = curves
            .par_iter()
            .map(|(label, structure, seed)| {
                let mut rcfg = solver.root_config();
                rcfg.seed = *seed;
                let solve = |p: f64, cfg: &linewave::RootSearchConfig| -> linewave::Result<RootReport> {
                    let s = structure
                        .with_param(param, p)
                        .and_then(|s| s.build())
                        .map_err(|e| linewave::Error::Config(format!("{e:#}")))?;
                    let n = (param == SweepParam::N).then_some(p as usize);
                    let sol = solve_at(&s, solver, n, cfg)?;
                    sol.report.ok_or_else(|| linewave::Error::Config("missing root report".into()))
                };
                let pts = sweep(&sw.grid, &rcfg, solve).with_context(|| format!("curve {label}"))?;
                Ok(pts
                    .into_iter()
                    .map(|p| DispersionRow {
                        param: p.param,
                        beta: p.root.map(|z| z.re),
                        alpha: p.root.map(|z| -z.im),
                        sigma_min: p.report.and_then(|r| r.sigma_min),
                        status: match p.status {
                            SweepStatus::Ok => "ok".into(),
                            SweepStatus::Jump => "jump".into(),
                            SweepStatus::Failed(_) => "failed".into(),
                        },
                    })
                    .collect())
            })
            .collect();
        let mut done = Vec::new();
        for ((label, _, _), res) in curves.iter().zip(results) {
            done.push((label.clone(), res?));
        }
        let mut partial = false;
        for (label, rows) in &done {
            for r in rows {
                match (r.beta, r.alpha) {
                    (Some(b), Some(a)) => println!(
                        "{label}: {} = {}: kz = {} [{}]",
                        param.name(),
                        fmt12(r.param),
                        describe(c(b, -a)),
                        r.status
                    ),
                    _ => {
                        partial = true;
                        println!("{label}: {} = {}: failed", param.name(), fmt12(r.param));
                    }
                }
            }
            let file = if sw.curves.is_empty() { self.path("_dispersion.csv") } else { self.path(&format!("_{label}.csv")) };
            write_dispersion(&file, rows)?;
        }
        if self.cfg.output.plot {
            std::fs::write(self.path("_dispersion.svg"), plot::dispersion_svg(&done, param.label())?)?;
        }
        Ok(Outcome { partial })
    }

    fn surface_waves(&self) -> anyhow::Result<Outcome> {
        let mut w = csv::Writer::from_path(self.path("_sw.csv"))?;
        w.write_record(["side", "polarization", "re_kt", "im_kt"])?;
        for (side, y) in self.cfg.structure.planes()? {
            let waves = uniform_sw_wavenumbers(&y);
            if waves.is_empty() {
                println!("{side}: no surface wave on the proper sheet");
            }
            for sw in waves {
                let pol = match sw.polarization {
                    Polarization::Tm => "TM",
                    Polarization::Te => "TE",
                    Polarization::Hybrid => "hybrid",
                };
                println!("{side}: {pol} surface wave, kt = {}", describe(sw.kt));
                w.write_record([side.to_string(), pol.to_string(), fmt12(sw.kt.re), fmt12(sw.kt.im)])?;
            }
        }
        w.flush()?;
        Ok(Outcome { partial: false })
    }
}

/// Runs the analytic integrals and the pinned fixture suite. Returns true
/// when every check is within `1e-8`.
pub fn selftest(golden_out: Option<&Path>) -> anyhow::Result<bool> {
    const TOL: f64 = 1e-8;
    if let Some(p) = golden_out {
        std::fs::write(p, render_golden()?).with_context(|| format!("writing {}", p.display()))?;
        println!("golden fixtures written to {}", p.display());
    }
    let q = QuadratureConfig::default();
    let delta = 1e-3;
    let cat = SingularityCatalog::default()
        .with_extra(SingularityKind::SurfaceWavePole, c(0.7, delta))
        .with_extra(SingularityKind::SurfaceWavePole, c(0.7, -delta));
    let checks: [(&str, C64, f64); 3] = [
        ("int 1/(1+k^2) = pi", integrate_real_line(|k| c(1.0 / (1.0 + k * k), 0.0), &q, None)?.value, PI),
        ("int exp(-k^2) = sqrt(pi)", integrate_real_line(|k| c((-k * k).exp(), 0.0), &q, None)?.value, PI.sqrt()),
        (
            "int 1/((k-0.7)^2+d^2) = pi/d, d = 1e-3",
            integrate_real_line(move |k| c(1.0 / ((k - 0.7).powi(2) + delta * delta), 0.0), &q, Some(&cat))?.value,
            PI / delta,
        ),
    ];
    let mut ok = true;
    for (name, got, want) in checks {
        let e = (got - want).norm() / want;
        ok &= e < TOL;
        println!("{} {name}: relative error {e:.2e}", if e < TOL { "PASS" } else { "FAIL" });
    }
    let reports = run_fixture_suite(&q)?;
    for r in &reports {
        let pass = r.deviation < TOL;
        ok &= pass;
        println!("{} fixture {} [{}]: relative deviation {:.2e}", if pass { "PASS" } else { "FAIL" }, r.name, r.digest, r.deviation);
    }
    println!("selftest: {} ({} fixtures)", if ok { "all checks passed" } else { "FAILED" }, reports.len());
    Ok(ok)
}
