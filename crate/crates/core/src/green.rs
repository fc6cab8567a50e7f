//! Spectral Green's function of a uniform impedance plane.
//!
//! The tangential field at `y = 0` due to a tangential electric current sheet
//! on the plane is split into TM and TE plane waves with respect to the
//! transverse wavevector `kt = (kz, kx)`. Each polarization sees a
//! transmission line of characteristic admittance `1/ky` (TM) or `ky` (TE)
//! loaded by the projected surface admittance; anisotropy couples the two
//! lines through the off-diagonal projected entries.

use crate::model::{AdmittanceDyadic, Dyadic};
use crate::rootfind::{muller, MullerConfig};
use crate::{Error, Result, C64};

pub use crate::model::Sheet;

/// `|det|` below this marks a surface-wave resonance of the network.
pub const RESONANCE_FLOOR: f64 = 1e-14;

/// `ky = sqrt(1 - kt^2)` on the requested sheet.
///
/// On the proper sheet `Im ky <= 0`; when `Im ky` is exactly zero the root
/// with `Re ky >= 0` is taken.
pub fn vertical_wavenumber(kt2: C64, sheet: Sheet) -> C64 {
    let mut s = (C64::new(1.0, 0.0) - kt2).sqrt();
    if s.im > 0.0 {
        s = -s;
    }
    if s.im == 0.0 && s.re < 0.0 {
        s = -s;
    }
    match sheet {
        Sheet::Proper => s,
        Sheet::Improper => -s,
    }
}

/// A point of the transverse spectral plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub kx_hat: C64,
    pub kz_hat: C64,
    pub kt2_hat: C64,
    pub ky_hat: C64,
    pub sheet: Sheet,
}

impl SpectralPoint {
    pub fn new(kx_hat: C64, kz_hat: C64, sheet: Sheet) -> Self {
        let kt2_hat = kz_hat * kz_hat + kx_hat * kx_hat;
        Self { kx_hat, kz_hat, kt2_hat, ky_hat: vertical_wavenumber(kt2_hat, sheet), sheet }
    }
}

/// Admittance dyadic projected on the TM/TE basis `(u, v)`, with
/// `u = (kz z + kx x)/kt` and `v = (-kx z + kz x)/kt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UVAdmittance {
    pub yuu: C64,
    pub yuv: C64,
    pub yvu: C64,
    pub yvv: C64,
}

pub fn project_uv(y: &Dyadic, kx: C64, kz: C64) -> Result<UVAdmittance> {
    let kt2 = kz * kz + kx * kx;
    if kt2.norm() == 0.0 {
        return Err(Error::OnAxis);
    }
    let (kz2, kx2, kzx) = (kz * kz, kx * kx, kz * kx);
    Ok(UVAdmittance {
        yuu: (kz2 * y.zz + kzx * (y.zx + y.xz) + kx2 * y.xx) / kt2,
        yuv: (kz2 * y.zx + kzx * (y.xx - y.zz) - kx2 * y.xz) / kt2,
        yvu: (kz2 * y.xz + kzx * (y.xx - y.zz) - kx2 * y.zx) / kt2,
        yvv: (kz2 * y.xx - kzx * (y.zx + y.xz) + kx2 * y.zz) / kt2,
    })
}

/// Generalized network Green's functions: the TM/TE voltages per unit
/// TM/TE source current. `v_a_b` is the `a`-line voltage due to a `b`-line
/// source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkVoltages {
    pub v_tm_tm: C64,
    pub v_tm_te: C64,
    pub v_te_tm: C64,
    pub v_te_te: C64,
    pub det: C64,
    /// `|det|` fell under [`RESONANCE_FLOOR`] (a surface-wave pole).
    pub resonant: bool,
}

pub fn network_voltages(uv: &UVAdmittance, ky: C64) -> Result<NetworkVoltages> {
    if ky.norm() == 0.0 {
        return Err(Error::BranchPoint);
    }
    let a = uv.yuu + ky.inv();
    let d = uv.yvv + ky;
    let det = a * d - uv.yuv * uv.yvu;
    let resonant = det.norm() < RESONANCE_FLOOR;
    if resonant {
        log::debug!("surface-wave resonance: |det| = {:e}", det.norm());
    }
    Ok(NetworkVoltages {
        v_tm_tm: d / det,
        v_tm_te: -uv.yuv / det,
        v_te_tm: -uv.yvu / det,
        v_te_te: a / det,
        det,
        resonant,
    })
}

/// Tangential-electric Green's dyadic at `y = y' = 0`, `(z, x)` order.
/// The field is `e = G . j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenDyadic {
    pub gzz: C64,
    pub gzx: C64,
    pub gxz: C64,
    pub gxx: C64,
    pub resonant: bool,
}

impl GreenDyadic {
    pub fn as_dyadic(&self) -> Dyadic {
        Dyadic::new(self.gzz, self.gzx, self.gxz, self.gxx)
    }
}

/// Green's dyadic from an already evaluated admittance.
pub fn green_from_dyadic(y: &Dyadic, kx: C64, kz: C64, sheet: Sheet) -> Result<GreenDyadic> {
    let p = SpectralPoint::new(kx, kz, sheet);
    let uv = project_uv(y, kx, kz)?;
    let v = network_voltages(&uv, p.ky_hat)?;
    let (kz2, kx2, kzx) = (kz * kz, kx * kx, kz * kx);
    let kt2 = p.kt2_hat;
    let (a, b, cc, d) = (v.v_tm_tm, v.v_tm_te, v.v_te_tm, v.v_te_te);
    Ok(GreenDyadic {
        gzz: -(kz2 * a - kzx * (b + cc) + kx2 * d) / kt2,
        gzx: -(kz2 * b + kzx * (a - d) - kx2 * cc) / kt2,
        gxz: -(kz2 * cc + kzx * (a - d) - kx2 * b) / kt2,
        gxx: -(kx2 * a + kzx * (b + cc) + kz2 * d) / kt2,
        resonant: v.resonant,
    })
}

/// Green's dyadic of the plane with admittance `y`.
pub fn green_ee(y: &AdmittanceDyadic, kx: C64, kz: C64, sheet: Sheet) -> Result<GreenDyadic> {
    green_from_dyadic(&y.at(kx, kz), kx, kz, sheet)
}

/// Height-aware entry point. Only `y = y' = 0` is implemented.
pub fn green_ee_at(
    y: &AdmittanceDyadic,
    kx: C64,
    kz: C64,
    sheet: Sheet,
    y_obs: f64,
    y_src: f64,
) -> Result<GreenDyadic> {
    if y_obs != 0.0 || y_src != 0.0 {
        return Err(Error::NonzeroHeight);
    }
    green_ee(y, kx, kz, sheet)
}

/// Large-`|kx|` limit of `G_xx` along the real axis: `-1/Y_xx`.
pub fn gxx_asymptote(y: &Dyadic) -> C64 {
    -y.xx.inv()
}

/// Network determinant as a function of the transverse wavevector.
fn network_det(y: &Dyadic, kx: C64, kz: C64, sheet: Sheet) -> Option<C64> {
    let uv = project_uv(y, kx, kz).ok()?;
    let p = SpectralPoint::new(kx, kz, sheet);
    network_voltages(&uv, p.ky_hat).ok().map(|v| v.det)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Tm,
    Te,
    Hybrid,
}

/// A surface wave of a uniform plane, propagating along `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceWave {
    pub kt: C64,
    pub polarization: Polarization,
}

fn proper_candidate(ky: C64) -> Option<C64> {
    // accept only roots that sit on the proper sheet
    if ky.norm() == 0.0 || !ky.is_finite() {
        return None;
    }
    let chosen = vertical_wavenumber(C64::new(1.0, 0.0) - ky * ky, Sheet::Proper);
    if (chosen - ky).norm() > 1e-12 * ky.norm().max(1.0) {
        return None;
    }
    let kt = (C64::new(1.0, 0.0) - ky * ky).sqrt();
    Some(if kt.re < 0.0 { -kt } else { kt })
}

/// Surface waves of the uniform plane `y`.
///
/// Isotropic planes use the closed forms `ky = -1/Y` (TM) and `ky = -Y`
/// (TE). Anisotropic planes are searched along `z` with Muller iteration on
/// the network determinant.
pub fn uniform_sw_wavenumbers(y: &AdmittanceDyadic) -> Vec<SurfaceWave> {
    let d = *y.nominal();
    if d.max_abs() == 0.0 {
        return Vec::new();
    }
    if y.is_isotropic() {
        let yy = d.zz;
        let mut out = Vec::new();
        if let Some(kt) = proper_candidate(-yy.inv()) {
            out.push(SurfaceWave { kt, polarization: Polarization::Tm });
        }
        if let Some(kt) = proper_candidate(-yy) {
            out.push(SurfaceWave { kt, polarization: Polarization::Te });
        }
        return out;
    }
    let f = |kt: C64| network_det(&d, C64::new(0.0, 0.0), kt, Sheet::Proper);
    let mut seeds = Vec::new();
    for cand in [-d.zz.inv(), -d.xx] {
        if let Some(kt) = proper_candidate(cand) {
            seeds.push(kt);
        }
    }
    let mut prev = f(C64::new(1.0, 0.0));
    for i in 1..=80 {
        let k = C64::new(1.0 + 4.0 * i as f64 / 80.0, 0.0);
        let cur = f(k);
        if let (Some(p), Some(q)) = (prev, cur) {
            if p.re * q.re <= 0.0 || p.im * q.im <= 0.0 {
                seeds.push(k);
            }
        }
        prev = cur;
    }
    let mut found: Vec<SurfaceWave> = Vec::new();
    let cfg = MullerConfig::default();
    for s in seeds {
        let g = |kt: C64| f(kt).ok_or(Error::NonFinite(kt));
        let Ok(r) = muller(&g, s, cfg) else { continue };
        let kt = if r.root.re < 0.0 { -r.root } else { r.root };
        let scale = d.max_abs().max(1.0) * kt.norm().max(1.0);
        let ok = f(kt).map(|v| v.norm() < 1e-9 * scale).unwrap_or(false);
        if ok && kt.re > 1e-9 && !found.iter().any(|w| (w.kt - kt).norm() < 1e-7) {
            found.push(SurfaceWave { kt, polarization: Polarization::Hybrid });
        }
    }
    found.sort_by(|a, b| a.kt.re.total_cmp(&b.kt.re));
    found
}

/// Poles of the Green's function in the complex `kx` plane for a given `kz`,
/// i.e. zeros of the network determinant, as `+-kp` pairs.
pub fn sw_poles_kx(y: &AdmittanceDyadic, kz: C64, sheet: Sheet) -> Vec<C64> {
    let d = *y.nominal();
    let waves = uniform_sw_wavenumbers(&AdmittanceDyadic::constant(d));
    let mut seeds: Vec<C64> = Vec::new();
    for w in &waves {
        let kp = (w.kt * w.kt - kz * kz).sqrt();
        seeds.push(kp);
        seeds.push(-kp);
    }
    if y.is_isotropic() || seeds.is_empty() {
        return seeds;
    }
    // anisotropic: the plane-wave condition depends on direction, so polish
    // each seed on the determinant in the kx plane
    let mut out: Vec<C64> = Vec::new();
    let cfg = MullerConfig::default();
    for s in seeds {
        let g = |kx: C64| network_det(&d, kx, kz, sheet).ok_or(Error::NonFinite(kx));
        if let Ok(r) = muller(&g, s, cfg) {
            let scale = d.max_abs().max(1.0) * r.root.norm().max(1.0);
            let ok = g(r.root).map(|v| v.norm() < 1e-8 * scale).unwrap_or(false);
            if ok && !out.iter().any(|p| (p - r.root).norm() < 1e-7) {
                out.push(r.root);
            }
        }
    }
    out
}
