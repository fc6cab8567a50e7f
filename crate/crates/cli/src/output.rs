//! CSV result files.
//!
//! Numbers carry 12 significant digits in a fixed format so identical runs
//! give identical bytes. Columns:
//!
//! * dispersion: `param,beta_hat,alpha_hat,sigma_min,status`
//! * field: `x_over_lambda0,re_ex,im_ex,re_ez,im_ez,re_jsx,im_jsx,re_jsz,im_jsz`

use std::path::Path;

use anyhow::{bail, Context};
use linewave::FieldSample;

pub const DISPERSION_HEADER: [&str; 5] = ["param", "beta_hat", "alpha_hat", "sigma_min", "status"];
pub const FIELD_HEADER: [&str; 9] =
    ["x_over_lambda0", "re_ex", "im_ex", "re_ez", "im_ez", "re_jsx", "im_jsx", "re_jsz", "im_jsz"];

/// `x` with 12 significant digits; plain notation for moderate magnitudes.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..12).contains(&e) {
        let s = format!("{:.*}", (11 - e).max(0) as usize, x);
        // rounding may have carried into a new leading digit
        let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
        if digits > 12 && e + 1 < 12 {
            return format!("{:.*}", (10 - e).max(0) as usize, x);
        }
        s
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionRow {
    pub param: f64,
    /// `None` for failed points.
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    pub sigma_min: Option<f64>,
    pub status: String,
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt12).unwrap_or_default()
}

pub fn write_dispersion(path: &Path, rows: &[DispersionRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(DISPERSION_HEADER)?;
    for r in rows {
        w.write_record([fmt12(r.param), opt(r.beta), opt(r.alpha), opt(r.sigma_min), r.status.clone()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_field(path: &Path, rows: &[FieldSample]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(FIELD_HEADER)?;
    for r in rows {
        let v = [
            r.x_over_lambda0,
            r.e_x.re,
            r.e_x.im,
            r.e_z.re,
            r.e_z.im,
            r.j_sx.re,
            r.j_sx.im,
            r.j_sz.re,
            r.j_sz.im,
        ];
        w.write_record(v.iter().map(|&x| fmt12(x)))?;
    }
    w.flush()?;
    Ok(())
}

fn check_header(path: &Path, got: &csv::StringRecord, want: &[&str]) -> anyhow::Result<()> {
    if got.iter().ne(want.iter().copied()) {
        bail!("{}: expected columns {}", path.display(), want.join(","));
    }
    Ok(())
}

fn num(s: &str, path: &Path, line: usize) -> anyhow::Result<f64> {
    s.trim().parse().with_context(|| format!("{}:{line}: bad number {s:?}", path.display()))
}

fn opt_num(s: &str, path: &Path, line: usize) -> anyhow::Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        num(s, path, line).map(Some)
    }
}

pub fn read_dispersion(path: &Path) -> anyhow::Result<Vec<DispersionRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    check_header(path, r.headers()?, &DISPERSION_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        out.push(DispersionRow {
            param: num(&rec[0], path, line)?,
            beta: opt_num(&rec[1], path, line)?,
            alpha: opt_num(&rec[2], path, line)?,
            sigma_min: opt_num(&rec[3], path, line)?,
            status: rec[4].to_string(),
        });
    }
    if out.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(out)
}

pub fn read_field(path: &Path) -> anyhow::Result<Vec<FieldSample>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    check_header(path, r.headers()?, &FIELD_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let v: Vec<f64> = rec.iter().map(|s| num(s, path, i + 2)).collect::<anyhow::Result<_>>()?;
        let z = |k: usize| linewave::c(v[k], v[k + 1]);
        out.push(FieldSample { x_over_lambda0: v[0], e_x: z(1), e_z: z(3), j_sx: z(5), j_sz: z(7), converged: true });
    }
    if out.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(5f64.sqrt()), "2.23606797750");
        assert_eq!(fmt12(-0.001), "-0.00100000000000");
        assert_eq!(fmt12(1e-7), "1.00000000000e-7");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(99.99999999999999), "100.000000000");
        for x in [1.0, 123.456, -7.25e-3, 3.0e15, 0.5] {
            assert_eq!(fmt12(x).parse::<f64>().unwrap(), x);
        }
    }
}
