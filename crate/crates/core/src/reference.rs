//! Slow, independent oracles.
//!
//! Nothing here reuses the main numerical path: the Green's function is a
//! direct 2x2 solve of `-(Y1 + Y0)^-1` with the free-space admittance built
//! in Cartesian components, Laguerre polynomials come from their explicit
//! coefficients, and integrals use adaptive Gauss-Kronrod instead of DE
//! rules. MoM entries are integrated one by one with the full kernel.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::basis::BasisSpec;
use crate::green::Polarization;
use crate::model::StructureSpec;
use crate::{Error, Result, C64, J};

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1]
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Subinterval limit of [`gk_integrate`].
pub const GK_MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkResult {
    pub value: C64,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

/// Adaptive G7K15 on `[a, b]`; either end may be infinite.
///
/// Infinite ranges are mapped to finite ones: `k = s tan(t)` for the whole
/// line and `k = a + s t/(1-t)` for half lines.
pub fn gk_integrate<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> Result<GkResult> {
    gk_integrate_with(f, a, b, tol, 0.0, 1.0)
}

/// As [`gk_integrate`] with an absolute error floor and an explicit length
/// scale `s` for the infinite maps.
pub fn gk_integrate_with<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64, abs_tol: f64, s: f64) -> Result<GkResult> {
    let sign = if b < a { -1.0 } else { 1.0 };
    let (a, b) = if b < a { (b, a) } else { (a, b) };
    let g: Box<dyn Fn(f64) -> C64> = match (a.is_finite(), b.is_finite()) {
        (true, true) => Box::new(&f),
        (false, false) => Box::new(|t: f64| {
            let c = t.cos();
            f(s * t.tan()) * (s / (c * c))
        }),
        (true, false) => Box::new(move |t: f64| {
            let u = 1.0 - t;
            f(a + s * t / u) * (s / (u * u))
        }),
        (false, true) => Box::new(move |t: f64| {
            let u = 1.0 - t;
            f(b - s * t / u) * (s / (u * u))
        }),
    };
    let (lo, hi) = match (a.is_finite(), b.is_finite()) {
        (true, true) => (a, b),
        (false, false) => (-FRAC_PI_2, FRAC_PI_2),
        _ => (0.0, 1.0),
    };
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(&g, lo, hi);
    heap.push(Piece { a: lo, b: hi, value: v, error: e });
    let mut total = v;
    let mut err = e;
    if !v.is_finite() {
        return Err(Error::Quadrature { estimate: v * sign, error: f64::INFINITY, levels: 1 });
    }
    while err > (tol * total.norm()).max(abs_tol).max(1e-300) {
        if heap.len() >= GK_MAX_INTERVALS {
            return Err(Error::Quadrature { estimate: total * sign, error: err, levels: heap.len() });
        }
        let p = heap.pop().unwrap();
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            return Err(Error::Quadrature { estimate: total * sign, error: err, levels: heap.len() });
        }
        let (v1, e1) = gk15(&g, p.a, m);
        let (v2, e2) = gk15(&g, m, p.b);
        heap.push(Piece { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Piece { a: m, b: p.b, value: v2, error: e2 });
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        if heap.len() % 256 == 0 {
            // re-sum to avoid drift
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Quadrature { estimate: total * sign, error: err, levels: heap.len() });
        }
    }
    let total: C64 = heap.iter().map(|p| p.value).sum();
    let err: f64 = heap.iter().map(|p| p.error).sum();
    Ok(GkResult { value: total * sign, error: err, intervals: heap.len() })
}

/// Vertical wavenumber on the proper sheet, written independently.
fn ky_proper(kt2: C64) -> C64 {
    let mut ky = (1.0 - kt2).sqrt();
    if ky.im > 0.0 || (ky.im == 0.0 && ky.re < 0.0) {
        ky = -ky;
    }
    ky
}

/// Green's dyadic `[[zz, zx], [xz, xx]]` as `-(Y1 + Y0)^-1`.
pub fn green_oracle(y1: [[C64; 2]; 2], kx: C64, kz: C64) -> [[C64; 2]; 2] {
    let kt2 = kx * kx + kz * kz;
    let ky = ky_proper(kt2);
    let ytm = 1.0 / ky;
    let yte = ky;
    let y0zz = (kz * kz * ytm + kx * kx * yte) / kt2;
    let y0zx = kz * kx * (ytm - yte) / kt2;
    let y0xx = (kx * kx * ytm + kz * kz * yte) / kt2;
    let m = [[y1[0][0] + y0zz, y1[0][1] + y0zx], [y1[1][0] + y0zx, y1[1][1] + y0xx]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[-m[1][1] / det, m[0][1] / det], [m[1][0] / det, -m[0][0] / det]]
}

fn dyadic_array(d: &crate::model::Dyadic) -> [[C64; 2]; 2] {
    [[d.zz, d.zx], [d.xz, d.xx]]
}

/// Kernel `I - (Y2 - Y1) G` in `[[zz, zx], [xz, xx]]` layout.
pub fn kernel_oracle(structure: &StructureSpec, kx: C64, kz: C64) -> [[C64; 2]; 2] {
    let y1 = dyadic_array(&structure.y1.at(kx, kz));
    let y2 = dyadic_array(&structure.y2.at(kx, kz));
    let g = green_oracle(y1, kx, kz);
    let mut k = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut s = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            for l in 0..2 {
                s -= (y2[i][l] - y1[i][l]) * g[l][j];
            }
            k[i][j] = s;
        }
    }
    k
}

/// `k0 L~_n(k)` straight from its closed form.
pub fn spectral_basis_oracle(n: usize, a: C64, k: C64) -> C64 {
    J * (k - J * a).powi(n as i32 - 1) / (k + J * a).powi(n as i32)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients of `L_n`, lowest power first, for `n <= 8`.
pub fn laguerre_coefficients(n: usize) -> Vec<f64> {
    assert!(n <= 8, "explicit Laguerre coefficients are tabulated for n <= 8");
    let mut fact = 1.0;
    (0..=n)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
            sgn * binomial(n, k) / fact
        })
        .collect()
}

/// Spatial basis function `n` (1-based, `n <= 9`) from explicit coefficients.
pub fn spatial_basis_oracle(n: usize, a: C64, xhat: f64) -> C64 {
    let u = 2.0 * a * xhat;
    let l: C64 = laguerre_coefficients(n - 1).iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * u + c);
    l * (-a * xhat).exp()
}

/// Scale for the infinite-line map: puts the near-axis singularities in
/// the middle of the mapped interval.
fn oracle_scale(basis: &BasisSpec, kz: C64) -> f64 {
    basis.a.norm().max(kz.norm()).max(1.0)
}

/// One MoM entry by direct integration of the full kernel.
pub fn dense_entry(structure: &StructureSpec, kz: C64, basis: &BasisSpec, p: usize, q: usize, m: usize, n: usize, tol: f64) -> Result<C64> {
    // p, q: 0 = x, 1 = z; m, n are 1-based
    let a = basis.a;
    let idx = |c: usize| if c == 0 { 1 } else { 0 };
    let f = |k: f64| {
        let kc = C64::new(k, 0.0);
        let kk = kernel_oracle(structure, kc, kz);
        spectral_basis_oracle(m, a, -kc) * kk[idx(p)][idx(q)] * spectral_basis_oracle(n, a, kc)
    };
    // split at the real parts of nearby poles so bisection starts well
    let mut cuts: Vec<f64> = Vec::new();
    for s in crate::kernel::build_catalog(structure, kz, Some(a), crate::green::Sheet::Proper).entries {
        if s.kx.im.abs() < 0.5 {
            cuts.push(s.kx.re);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let sc = oracle_scale(basis, kz);
    // entries are O(pi/|a|); vanishing ones need an absolute floor
    let abs_tol = tol * 1e-2 * PI / a.norm();
    if cuts.is_empty() {
        return Ok(gk_integrate_with(f, f64::NEG_INFINITY, f64::INFINITY, tol, abs_tol, sc)?.value);
    }
    let mut total = gk_integrate_with(f, f64::NEG_INFINITY, cuts[0], tol, abs_tol, sc)?.value;
    for w in cuts.windows(2) {
        total += gk_integrate_with(f, w[0], w[1], tol, abs_tol, 1.0)?.value;
    }
    total += gk_integrate_with(f, *cuts.last().unwrap(), f64::INFINITY, tol, abs_tol, sc)?.value;
    Ok(total)
}

/// Full MoM matrix, entry by entry, ordered `[x-functions, z-functions]`.
pub fn dense_assemble(structure: &StructureSpec, kz: C64, basis: &BasisSpec, tol: f64) -> Result<DMatrix<C64>> {
    let (nx, nz) = (basis.n_x, basis.n_z);
    let dim = nx + nz;
    let mut z = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for r in 0..dim {
        for c in 0..dim {
            let (p, m) = if r < nx { (0, r + 1) } else { (1, r - nx + 1) };
            let (q, n) = if c < nx { (0, c + 1) } else { (1, c - nx + 1) };
            z[(r, c)] = dense_entry(structure, kz, basis, p, q, m, n, tol)?;
        }
    }
    Ok(z)
}

/// Closed-form surface wave of an isotropic reactive plane.
pub fn closed_form_sw(zbar: C64) -> Option<(Polarization, f64)> {
    if zbar.re.abs() > 1e-14 * zbar.norm() || zbar.im == 0.0 {
        return None;
    }
    let x = zbar.im;
    if x > 0.0 {
        Some((Polarization::Tm, (1.0 + x * x).sqrt()))
    } else {
        Some((Polarization::Te, (1.0 + 1.0 / (x * x)).sqrt()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub digest: String,
    pub oracle: C64,
    pub artifact: C64,
    pub deviation: f64,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, digest: impl Into<String>, oracle: C64, artifact: C64) -> Self {
        let deviation = (artifact - oracle).norm() / oracle.norm().max(1e-300);
        Self { name: name.into(), digest: digest.into(), oracle, artifact, deviation }
    }
}

/// Short hex digest of a canonical input description.
pub fn inputs_digest(desc: &str) -> String {
    let h = Sha256::digest(desc.as_bytes());
    h.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// A pinned fixture: one MoM entry of one structure.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub structure: StructureSpec,
    pub kz: C64,
    pub basis: BasisSpec,
    /// Row and column in the assembled matrix.
    pub entry: (usize, usize),
    pub desc: String,
}

/// The pinned fixture set.
pub fn fixtures() -> Vec<Fixture> {
    let s3 = 3f64.sqrt();
    let fig4 = StructureSpec::isotropic(C64::new(0.0, 1.0 / s3), C64::new(0.0, -s3)).expect("valid");
    let leaky = StructureSpec::isotropic(C64::new(0.0, -0.5), C64::new(0.1, -0.5)).expect("valid");
    let basis = BasisSpec::with_a(2, 2, C64::new(0.5, 0.0)).expect("valid");
    let mut cases: Vec<(String, StructureSpec, C64)> = Vec::new();
    for kz in [1.3, 1.5, 2.0] {
        cases.push((format!("fig4_kz{kz}"), fig4.clone(), C64::new(kz, 0.0)));
    }
    cases.push(("leaky_kz1.548-0.111j".into(), leaky, C64::new(1.548, -0.111)));
    for (tag, xi) in [("0", 0.0), ("pi4", FRAC_PI_4)] {
        cases.push((format!("rotated_xi{tag}"), StructureSpec::rotated_capacitive(1.0, xi).expect("valid"), C64::new(2.0, 0.0)));
    }
    let mut out = Vec::new();
    for (name, s, kz) in cases {
        for (r, c) in [(0, 0), (0, 1), (0, 3), (3, 0), (2, 2), (3, 2)] {
            let desc = format!(
                "y1={:?};y2={:?};kz={:.17e},{:.17e};a={:.17e},{:.17e};n=2,2;entry={r},{c}",
                s.y1.nominal().entries(),
                s.y2.nominal().entries(),
                kz.re,
                kz.im,
                basis.a.re,
                basis.a.im
            );
            out.push(Fixture { name: format!("{name}/Z[{r}][{c}]"), structure: s.clone(), kz, basis, entry: (r, c), desc });
        }
    }
    out
}

/// Oracle value of a fixture.
pub fn fixture_oracle(f: &Fixture) -> Result<C64> {
    let nx = f.basis.n_x;
    let (r, c) = f.entry;
    let (p, m) = if r < nx { (0, r + 1) } else { (1, r - nx + 1) };
    let (q, n) = if c < nx { (0, c + 1) } else { (1, c - nx + 1) };
    dense_entry(&f.structure, f.kz, &f.basis, p, q, m, n, 1e-11)
}

/// Golden records shipped with the crate.
pub const GOLDEN: &str = include_str!("../golden/fixtures.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRecord {
    pub name: String,
    pub digest: String,
    pub value: C64,
}

/// Parses `name, inputs-digest, re, im` lines; `#` starts a comment.
pub fn parse_golden(text: &str) -> Result<Vec<GoldenRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!("golden line {}: expected 4 fields", i + 1)));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Config(format!("golden line {}: {e}", i + 1)));
        out.push(GoldenRecord { name: parts[0].into(), digest: parts[1].into(), value: C64::new(num(parts[2])?, num(parts[3])?) });
    }
    Ok(out)
}

/// Regenerates the golden file text from the oracles.
pub fn render_golden() -> Result<String> {
    let mut s = String::from("# name, inputs-digest, re, im\n# MoM entries from dense_entry (Gauss-Kronrod, full kernel), N = 2 + 2, a = 1/2\n");
    for f in fixtures() {
        let v = fixture_oracle(&f)?;
        let _ = writeln!(s, "{}, {}, {:.17e}, {:.17e}", f.name, inputs_digest(&f.desc), v.re, v.im);
    }
    Ok(s)
}

/// Compares the main assembly path with the golden records.
pub fn run_fixture_suite(qcfg: &crate::QuadratureConfig) -> Result<Vec<OracleReport>> {
    let golden = parse_golden(GOLDEN)?;
    let mut out = Vec::new();
    for f in fixtures() {
        let digest = inputs_digest(&f.desc);
        let rec = golden
            .iter()
            .find(|g| g.name == f.name)
            .ok_or_else(|| Error::Config(format!("missing golden record {}", f.name)))?;
        if rec.digest != digest {
            return Err(Error::Config(format!("golden record {} has stale inputs digest", f.name)));
        }
        let sys = crate::mom::assemble(&f.structure, f.kz, &f.basis, crate::Sheet::Proper, qcfg)?;
        out.push(OracleReport::new(f.name.clone(), digest, rec.value, sys.matrix[f.entry]));
    }
    Ok(out)
}

/// `(1/2pi) int f~(k) exp(-j k x) dk` for a spectral function given on the
/// real line, by Gauss-Kronrod on a finite window plus a cut-off.
pub fn inverse_transform(f: impl Fn(f64) -> C64, x: f64, tol: f64) -> Result<C64> {
    let g = |k: f64| f(k) * (-J * k * x).exp();
    Ok(gk_integrate(g, f64::NEG_INFINITY, f64::INFINITY, tol)?.value / (2.0 * PI))
}
