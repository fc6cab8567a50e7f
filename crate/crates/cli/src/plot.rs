//! Deterministic SVG plots of dispersion curves and field profiles.
//!
//! Fixed canvas, fixed palette, coordinates rounded to two decimals; the
//! same data always renders to the same bytes.

use std::fmt::Write;

use anyhow::bail;
use linewave::FieldSample;

use crate::output::DispersionRow;

const WIDTH: f64 = 720.0;
const PANEL_H: f64 = 340.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf"];

/// A named sequence of points. `None` breaks the line.
pub struct Series {
    pub label: String,
    pub points: Vec<Option<(f64, f64)>>,
}

struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Panel {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xr.0) / (self.xr.1 - self.xr.0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.yr.0) / (self.yr.1 - self.yr.0) * self.h
    }
}

fn range<'a>(vals: impl Iterator<Item = &'a f64>) -> Option<(f64, f64)> {
    let (lo, hi) = vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    if hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1e-300) {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        return Some((lo - pad, hi + pad));
    }
    let pad = 0.04 * (hi - lo);
    Some((lo - pad, hi + pad))
}

fn tick_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn ticks(r: (f64, f64)) -> (Vec<f64>, usize) {
    let step = tick_step(r.1 - r.0);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (r.0 / step).ceil() as i64;
    let last = (r.1 / step).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw_panel(svg: &mut String, p: &Panel, series: &[Series], x_label: &str, y_label: &str) {
    let _ = writeln!(
        svg,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000"/>"##,
        p.x0, p.y0, p.w, p.h
    );
    let (xt, xd) = ticks(p.xr);
    for t in xt {
        let x = p.px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{:.*}</text>"##,
            p.y0,
            p.y0 + p.h,
            p.y0 + p.h + 18.0,
            xd,
            t
        );
    }
    let (yt, yd) = ticks(p.yr);
    for t in yt {
        let y = p.py(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{:.*}</text>"##,
            p.x0,
            p.x0 + p.w,
            p.x0 - 6.0,
            y + 4.0,
            yd,
            t
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        p.x0 + p.w / 2.0,
        p.y0 + p.h + 40.0,
        esc(x_label)
    );
    let (lx, ly) = (p.x0 - 58.0, p.y0 + p.h / 2.0);
    let _ = writeln!(
        svg,
        r#"<text x="{lx:.2}" y="{ly:.2}" text-anchor="middle" transform="rotate(-90 {lx:.2} {ly:.2})">{}</text>"#,
        esc(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for pt in &s.points {
            match pt {
                Some((x, y)) if x.is_finite() && y.is_finite() => runs.last_mut().unwrap().push((p.px(*x), p.py(*y))),
                _ => runs.push(Vec::new()),
            }
        }
        for run in runs.iter().filter(|r| !r.is_empty()) {
            if run.len() == 1 {
                let (x, y) = run[0];
                let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}"/>"#);
            } else {
                let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
                    pts.join(" ")
                );
            }
        }
        let ly = p.y0 + 14.0 + 18.0 * i as f64;
        let lx = p.x0 + p.w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0,
            lx + 26.0,
            esc(&s.label)
        );
    }
}

/// Stacks one panel per entry of `panels`, sharing the x-axis label.
fn render(panels: &[(&[Series], &str)], x_label: &str) -> anyhow::Result<String> {
    let xs: Vec<f64> = panels
        .iter()
        .flat_map(|(ss, _)| ss.iter())
        .flat_map(|s| s.points.iter().flatten().map(|p| p.0))
        .collect();
    let Some(xr) = range(xs.iter()) else { bail!("nothing to plot") };
    let height = panels.len() as f64 * (PANEL_H + MARGIN_T + MARGIN_B);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    for (k, (series, y_label)) in panels.iter().enumerate() {
        let ys: Vec<f64> = series.iter().flat_map(|s| s.points.iter().flatten().map(|p| p.1)).collect();
        let yr = range(ys.iter()).unwrap_or((-1.0, 1.0));
        let p = Panel {
            x0: MARGIN_L,
            y0: k as f64 * (PANEL_H + MARGIN_T + MARGIN_B) + MARGIN_T,
            w: WIDTH - MARGIN_L - MARGIN_R,
            h: PANEL_H,
            xr,
            yr,
        };
        draw_panel(&mut svg, &p, series, x_label, y_label);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// `beta` (and `alpha` when any curve is lossy) against the swept parameter.
pub fn dispersion_svg(curves: &[(String, Vec<DispersionRow>)], x_label: &str) -> anyhow::Result<String> {
    if curves.iter().all(|(_, rows)| rows.is_empty()) {
        bail!("empty dispersion data");
    }
    let lossy = curves.iter().flat_map(|(_, r)| r).any(|r| r.alpha.is_some_and(|a| a.abs() > 1e-9));
    let pick = |f: fn(&DispersionRow) -> Option<f64>| -> Vec<Series> {
        curves
            .iter()
            .map(|(label, rows)| Series {
                label: label.clone(),
                points: rows.iter().map(|r| f(r).map(|y| (r.param, y))).collect(),
            })
            .collect()
    };
    let beta = pick(|r| r.beta);
    if lossy {
        let alpha = pick(|r| r.alpha);
        render(&[(&beta, "beta_z / k0"), (&alpha, "alpha_z / k0")], x_label)
    } else {
        render(&[(&beta, "k_z / k0")], x_label)
    }
}

/// Magnitude and phase of `e_x`, `e_z`; x in wavelengths or meters.
pub fn field_svg(rows: &[FieldSample], meters_per_lambda: Option<f64>) -> anyhow::Result<String> {
    if rows.is_empty() {
        bail!("empty field data");
    }
    let scale = meters_per_lambda.unwrap_or(1.0);
    let x_label = if meters_per_lambda.is_some() { "x (m)" } else { "x / lambda0" };
    let mag = |f: fn(&FieldSample) -> linewave::C64, label: &str| Series {
        label: label.into(),
        points: rows.iter().map(|r| Some((r.x_over_lambda0 * scale, f(r).norm()))).collect(),
    };
    // break the line where the wrapped phase jumps; skip phase noise where
    // the field has decayed away
    let peak = rows.iter().map(|r| r.e_x.norm().max(r.e_z.norm())).fold(0.0, f64::max);
    let phase = |f: fn(&FieldSample) -> linewave::C64, label: &str| {
        let mut points = Vec::new();
        let mut last: Option<f64> = None;
        for r in rows {
            let v = f(r);
            let deg = if v.norm() <= 1e-5 * peak { None } else { Some(v.arg().to_degrees()) };
            if let (Some(a), Some(b)) = (last, deg) {
                if (a - b).abs() > 180.0 {
                    points.push(None);
                }
            }
            points.push(deg.map(|d| (r.x_over_lambda0 * scale, d)));
            last = deg;
        }
        Series { label: label.into(), points }
    };
    let mags = [mag(|r| r.e_x, "|e_x|"), mag(|r| r.e_z, "|e_z|")];
    let phases = [phase(|r| r.e_x, "arg e_x"), phase(|r| r.e_z, "arg e_z")];
    render(&[(&mags, "magnitude (normalized)"), (&phases, "phase (deg)")], x_label)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(p: f64, b: f64) -> DispersionRow {
        DispersionRow { param: p, beta: Some(b), alpha: Some(0.0), sigma_min: None, status: "ok".into() }
    }

    #[test]
    fn single_point_is_a_marker() {
        let svg = dispersion_svg(&[("a".into(), vec![row(0.0, 2.47)])], "param").unwrap();
        assert!(svg.contains("<circle"));
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn deterministic() {
        let rows: Vec<DispersionRow> = (0..20).map(|i| row(i as f64 * 0.1, 1.0 + (i as f64).sqrt())).collect();
        let a = dispersion_svg(&[("a".into(), rows.clone())], "param").unwrap();
        let b = dispersion_svg(&[("a".into(), rows)], "param").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(dispersion_svg(&[("a".into(), Vec::new())], "param").is_err());
        assert!(field_svg(&[], None).is_err());
    }

    #[test]
    fn ticks_cover_range() {
        let (t, d) = ticks((0.03, 0.97));
        assert_eq!(d, 1);
        assert!(t.first().unwrap() >= &0.03 && t.last().unwrap() <= &0.97);
        assert!(t.len() >= 4);
    }
}
