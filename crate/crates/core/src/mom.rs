//! Galerkin MoM matrix with Toeplitz blocks.
//!
//! With the Cayley variable `w` every entry is
//! `Z_pq[m][n] = int K_pq(k) w(k)^(n-m) / (k^2 + a^2) dk`, so each block is
//! fixed by the generator sequence `g_pq(d)`, `d = m - n`. The identity part
//! of `K` is integrated in closed form (`pi/a` on the diagonal) and only
//! `K - I` goes through quadrature.
//!
//! For isotropic, non-dispersive surfaces `K_xx`, `K_zz` are even in `kx`,
//! `K_xz = K_zx` is odd, and `w(-k) = 1/w(k)`. Then `g_pp(-d) = g_pp(d)`,
//! `g_xz(-d) = -g_xz(d)` and `g_zx = g_xz`, which leaves
//! `N_x + N_z + max(N_x, N_z)` distinct integrals.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::basis::BasisSpec;
use crate::green::Sheet;
use crate::kernel::KernelEvaluator;
use crate::linalg::{self, CMatrix};
use crate::model::StructureSpec;
use crate::quadrature::{integrate_real_line_vec, QuadratureConfig};
use crate::{Error, Result, C64, J};

/// Block identifiers in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    Xx,
    Xz,
    Zx,
    Zz,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::Xx, Block::Xz, Block::Zx, Block::Zz];

    pub fn name(&self) -> &'static str {
        match self {
            Block::Xx => "xx",
            Block::Xz => "xz",
            Block::Zx => "zx",
            Block::Zz => "zz",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }
}

/// Generator of one Toeplitz block: values for `d` in `d_min..=d_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzGenerator {
    pub d_min: i64,
    pub values: Vec<C64>,
}

impl ToeplitzGenerator {
    fn empty() -> Self {
        Self { d_min: 0, values: Vec::new() }
    }

    pub fn d_max(&self) -> i64 {
        self.d_min + self.values.len() as i64 - 1
    }

    pub fn get(&self, d: i64) -> C64 {
        self.values[(d - self.d_min) as usize]
    }
}

#[derive(Debug, Clone)]
pub struct MoMSystem {
    pub kz_hat: C64,
    pub basis: BasisSpec,
    pub sheet: Sheet,
    /// Generators in `[xx, xz, zx, zz]` order.
    pub generators: [ToeplitzGenerator; 4],
    /// Rows and columns ordered `[x-functions, z-functions]`.
    pub matrix: CMatrix,
    /// Distinct spectral integrals performed.
    pub integral_count: usize,
    /// True when the isotropic parity shortcuts were used.
    pub symmetric_path: bool,
    /// Quadrature error estimate (max norm) and node count.
    pub quad_error: f64,
    pub evaluations: usize,
}

/// Right null vector split into the two current components.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSpace {
    pub i_x: Vec<C64>,
    pub i_z: Vec<C64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `sigma_min / sigma_next`; small means a clean rank-one deficiency.
    pub separation: f64,
}

impl NullSpace {
    pub fn is_well_separated(&self) -> bool {
        self.separation <= 0.1
    }
}

/// One generator integral to perform.
#[derive(Debug, Clone, Copy)]
struct Job {
    block: Block,
    d: i64,
}

fn block_range(block: Block, nx: usize, nz: usize) -> (i64, i64) {
    // rows are test functions of the first index, columns basis functions of the second
    let (rows, cols) = match block {
        Block::Xx => (nx, nx),
        Block::Xz => (nx, nz),
        Block::Zx => (nz, nx),
        Block::Zz => (nz, nz),
    };
    if rows == 0 || cols == 0 {
        return (0, -1);
    }
    (-(cols as i64 - 1), rows as i64 - 1)
}

fn kernel_entry(k: &crate::model::Dyadic, block: Block) -> C64 {
    match block {
        Block::Xx => k.xx - 1.0,
        Block::Xz => k.xz,
        Block::Zx => k.zx,
        Block::Zz => k.zz - 1.0,
    }
}

/// Number of distinct generator integrals for the given sizes.
pub fn integral_count(n_x: usize, n_z: usize, symmetric: bool) -> usize {
    if symmetric {
        let cross = if n_x > 0 && n_z > 0 { n_x.max(n_z) } else { 0 };
        n_x + n_z + cross
    } else {
        Block::ALL
            .iter()
            .map(|&b| {
                let (lo, hi) = block_range(b, n_x, n_z);
                (hi - lo + 1).max(0) as usize
            })
            .sum()
    }
}

/// Assembles the MoM system at `kz_hat`.
pub fn assemble(
    structure: &StructureSpec,
    kz_hat: C64,
    basis: &BasisSpec,
    sheet: Sheet,
    qcfg: &QuadratureConfig,
) -> Result<MoMSystem> {
    assemble_with(structure, kz_hat, basis, sheet, qcfg, true)
}

/// As [`assemble`]; `use_symmetry = false` forces all four generator sets.
pub fn assemble_with(
    structure: &StructureSpec,
    kz_hat: C64,
    basis: &BasisSpec,
    sheet: Sheet,
    qcfg: &QuadratureConfig,
    use_symmetry: bool,
) -> Result<MoMSystem> {
    qcfg.validate()?;
    let a = basis.a;
    if !(a.re > 0.0) {
        return Err(Error::BadCoefficient(a));
    }
    let ev = KernelEvaluator::new(structure, kz_hat, sheet, Some(a))?;
    let (nx, nz) = (basis.n_x, basis.n_z);
    let symmetric = use_symmetry
        && structure.is_isotropic()
        && !structure.y1.is_dispersive()
        && !structure.y2.is_dispersive();

    let mut jobs: Vec<Job> = Vec::new();
    if symmetric {
        for d in 0..nx as i64 {
            jobs.push(Job { block: Block::Xx, d });
        }
        for d in 0..nz as i64 {
            jobs.push(Job { block: Block::Zz, d });
        }
        if nx > 0 && nz > 0 {
            for d in 0..nx.max(nz) as i64 {
                jobs.push(Job { block: Block::Xz, d });
            }
        }
    } else {
        for b in Block::ALL {
            let (lo, hi) = block_range(b, nx, nz);
            for d in lo..=hi {
                jobs.push(Job { block: b, d });
            }
        }
    }
    let max_d = jobs.iter().map(|j| j.d.unsigned_abs() as usize).max().unwrap_or(0);
    let a2 = a * a;

    let integrand = |k: f64, out: &mut [C64]| {
        let kk = ev.eval_real(k);
        let kc = C64::new(k, 0.0);
        let base = 1.0 / (kc * kc + a2);
        let w = (kc - J * a) / (kc + J * a);
        // w^(-d) for d in -max_d..=max_d
        let mut pos = Vec::with_capacity(max_d + 1);
        let mut neg = Vec::with_capacity(max_d + 1);
        let (mut p, mut q) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        let winv = 1.0 / w;
        for _ in 0..=max_d {
            pos.push(p);
            neg.push(q);
            p *= w;
            q *= winv;
        }
        let vals = [kernel_entry(&kk, Block::Xx), kernel_entry(&kk, Block::Xz), kernel_entry(&kk, Block::Zx), kernel_entry(&kk, Block::Zz)];
        for (o, job) in out.iter_mut().zip(&jobs) {
            let wd = if job.d >= 0 { neg[job.d as usize] } else { pos[(-job.d) as usize] };
            *o = vals[job.block.index()] * wd * base;
        }
    };

    let hint = a.norm().max(kz_hat.norm());
    let res = integrate_real_line_vec(&integrand, jobs.len(), qcfg, Some(&ev.catalog), hint);
    if !res.converged {
        let (worst, err) = res
            .component_errors
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &e)| if e > acc.1 { (i, e) } else { acc });
        let job = jobs.get(worst).copied().unwrap_or(Job { block: Block::Xx, d: 0 });
        return Err(Error::Assembly {
            block: job.block.name(),
            d: job.d,
            source: Box::new(Error::Quadrature { estimate: res.value.get(worst).copied().unwrap_or_default(), error: err, levels: res.levels }),
        });
    }

    let mut gens: [ToeplitzGenerator; 4] = std::array::from_fn(|_| ToeplitzGenerator::empty());
    for b in Block::ALL {
        let (lo, hi) = block_range(b, nx, nz);
        if hi >= lo {
            gens[b.index()] = ToeplitzGenerator { d_min: lo, values: vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize] };
        }
    }
    let identity = PI / a;
    let mut set = |b: Block, d: i64, v: C64| {
        let g = &mut gens[b.index()];
        if d >= g.d_min && d <= g.d_max() {
            g.values[(d - g.d_min) as usize] = v;
        }
    };
    for (job, &v) in jobs.iter().zip(&res.value) {
        let v_full = match job.block {
            Block::Xx | Block::Zz if job.d == 0 => v + identity,
            _ => v,
        };
        set(job.block, job.d, v_full);
        if symmetric {
            match job.block {
                Block::Xx | Block::Zz => set(job.block, -job.d, v_full),
                Block::Xz => {
                    set(Block::Xz, -job.d, -v_full);
                    set(Block::Zx, job.d, v_full);
                    set(Block::Zx, -job.d, -v_full);
                }
                Block::Zx => {}
            }
        }
    }

    let dim = nx + nz;
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for b in Block::ALL {
        let (r0, c0, rows, cols) = match b {
            Block::Xx => (0, 0, nx, nx),
            Block::Xz => (0, nx, nx, nz),
            Block::Zx => (nx, 0, nz, nx),
            Block::Zz => (nx, nx, nz, nz),
        };
        let g = &gens[b.index()];
        for i in 0..rows {
            for j in 0..cols {
                m[(r0 + i, c0 + j)] = g.get(i as i64 - j as i64);
            }
        }
    }
    Ok(MoMSystem {
        kz_hat,
        basis: *basis,
        sheet,
        generators: gens,
        matrix: m,
        integral_count: jobs.len(),
        symmetric_path: symmetric,
        quad_error: res.error,
        evaluations: res.evaluations,
    })
}

impl MoMSystem {
    pub fn generator(&self, b: Block) -> &ToeplitzGenerator {
        &self.generators[b.index()]
    }

    /// Sub-matrix of one block.
    pub fn block(&self, b: Block) -> CMatrix {
        let (nx, nz) = (self.basis.n_x, self.basis.n_z);
        let (r0, c0, rows, cols) = match b {
            Block::Xx => (0, 0, nx, nx),
            Block::Xz => (0, nx, nx, nz),
            Block::Zx => (nx, 0, nz, nx),
            Block::Zz => (nx, nx, nz, nz),
        };
        self.matrix.view((r0, c0), (rows, cols)).into_owned()
    }

    /// `det(Z a / pi)`: the determinant relative to the identity overlap.
    /// `det(Z a/pi)`. The identity block then has unit diagonal; this is
    /// analytic in `kz`, unlike per-row magnitude scaling.
    pub fn dispersion_residual(&self) -> C64 {
        let s = self.basis.a / PI;
        linalg::det(&(&self.matrix * s))
    }

    /// Null vector split into `(I_x, I_z)`.
    ///
    /// A truncated Laguerre basis also carries a mirror image of the mode,
    /// with its weight on the highest indices and the same `kz`. Near a root
    /// the two show up as a pair of small singular values whose vectors are
    /// even and odd mixtures of mode and image. When such a pair stands
    /// clear of the third singular value, the combination with the least
    /// weight on the upper half of each block is returned; otherwise the
    /// plain smallest singular vector.
    pub fn null_space_coefficients(&self) -> NullSpace {
        let (sv, vs) = linalg::right_singular_vectors(&self.matrix);
        let n = sv.len();
        let nx = self.basis.n_x;
        let nz = self.basis.n_z;
        let sigma_max = sv[0];
        let mut v = vs[n - 1].clone();
        let mut sigma_min = sv[n - 1];
        let mut next = if n >= 2 { sv[n - 2] } else { f64::INFINITY };
        let paired = n >= 3 && sv[n - 2] <= 0.05 * sv[n - 3] && nx.max(nz) >= 2;
        if paired {
            let tail = |i: usize| if i < nx { i >= nx.div_ceil(2) } else { i - nx >= nz.div_ceil(2) };
            let (v1, v2) = (&vs[n - 1], &vs[n - 2]);
            let (mut a, mut b, mut d) = (0.0, C64::new(0.0, 0.0), 0.0);
            for i in (0..n).filter(|&i| tail(i)) {
                a += v1[i].norm_sqr();
                d += v2[i].norm_sqr();
                b += v1[i].conj() * v2[i];
            }
            // smallest eigenvector of [[a, b], [b*, d]]
            let lam = 0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            let (c1, c2) = if (lam - d).abs() >= (lam - a).abs() {
                (C64::new(lam - d, 0.0), b.conj())
            } else {
                (b, C64::new(lam - a, 0.0))
            };
            let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
            if norm > 0.0 {
                let (c1, c2) = (c1 / norm, c2 / norm);
                v = v1.iter().zip(v2).map(|(x, y)| c1 * x + c2 * y).collect();
                let r = &self.matrix * nalgebra::DVector::from_vec(v.clone());
                sigma_min = r.norm();
                next = sv[n - 3];
                log::debug!("separated mode from its basis image (tail weight {lam:.2e})");
            }
        }
        let separation = if n >= 2 { sigma_min / next.max(1e-300) } else { 0.0 };
        if n >= 2 && separation > 0.1 {
            log::warn!(
                "not at a root or degenerate mode (kz = {}, sigma_min/sigma_next = {:.3e})",
                self.kz_hat,
                separation
            );
        }
        NullSpace { i_x: v[..nx].to_vec(), i_z: v[nx..].to_vec(), sigma_min, sigma_max, separation }
    }
}

/// Free-function form of [`MoMSystem::dispersion_residual`].
pub fn dispersion_residual(sys: &MoMSystem) -> C64 {
    sys.dispersion_residual()
}

/// Free-function form of [`MoMSystem::null_space_coefficients`].
pub fn null_space_coefficients(sys: &MoMSystem) -> NullSpace {
    sys.null_space_coefficients()
}

/// Residual as a function of `kz`; `kz`-dependent strategies re-resolve
/// the basis coefficient at every evaluation.
pub fn residual_fn<'a>(
    structure: &'a StructureSpec,
    basis: &'a BasisSpec,
    sheet: Sheet,
    qcfg: &'a QuadratureConfig,
) -> impl Fn(C64) -> Result<C64> + Sync + 'a {
    move |kz: C64| {
        let b = basis.refreshed(kz, structure)?;
        let sys = assemble(structure, kz, &b, sheet, qcfg)?;
        let r = sys.dispersion_residual();
        if r.is_finite() {
            Ok(r)
        } else {
            Err(Error::NonFinite(kz))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisStrategy;
    use crate::c;

    fn fig4() -> StructureSpec {
        StructureSpec::isotropic(c(0.0, 1.0 / 3f64.sqrt()), c(0.0, -3f64.sqrt())).unwrap()
    }

    #[test]
    fn toeplitz_by_construction() {
        let s = fig4();
        let b = BasisSpec::with_a(4, 3, c(0.5, 0.0)).unwrap();
        let sys = assemble(&s, c(1.5, 0.0), &b, Sheet::Proper, &QuadratureConfig::default()).unwrap();
        for blk in Block::ALL {
            let m = sys.block(blk);
            let g = sys.generator(blk);
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    assert_eq!(m[(i, j)], g.get(i as i64 - j as i64));
                }
            }
        }
    }

    #[test]
    fn integral_count_isotropic_and_general() {
        let s = fig4();
        let q = QuadratureConfig::default();
        for (nx, nz) in [(3, 5), (4, 4), (2, 1), (3, 0)] {
            let b = BasisSpec::with_a(nx, nz, c(0.5, 0.0)).unwrap();
            let sys = assemble(&s, c(1.5, 0.0), &b, Sheet::Proper, &q).unwrap();
            let cross = if nx > 0 && nz > 0 { nx.max(nz) } else { 0 };
            assert_eq!(sys.integral_count, nx + nz + cross);
            assert!(sys.symmetric_path);
        }
        // above every surface-wave wavenumber of the anisotropic plane
        let s = StructureSpec::rotated_capacitive(1.0, 0.3).unwrap();
        let b = BasisSpec::with_a(2, 3, c(0.5, 0.0)).unwrap();
        let sys = assemble(&s, c(2.0, 0.0), &b, Sheet::Proper, &q).unwrap();
        assert!(!sys.symmetric_path);
        assert_eq!(sys.integral_count, 3 + 4 + 4 + 5);
        assert_eq!(integral_count(2, 3, false), 16);
    }

    #[test]
    fn symmetric_and_general_paths_agree() {
        let s = fig4();
        let b = BasisSpec::with_a(3, 3, c(0.7, 0.1)).unwrap();
        let q = QuadratureConfig::default();
        let kz = c(1.6, -0.05);
        let fast = assemble_with(&s, kz, &b, Sheet::Proper, &q, true).unwrap();
        let full = assemble_with(&s, kz, &b, Sheet::Proper, &q, false).unwrap();
        let scale = linalg::max_abs(&full.matrix);
        assert!(linalg::max_abs(&(&fast.matrix - &full.matrix)) < 1e-9 * scale);
    }

    #[test]
    fn hermitian_and_antisymmetric_blocks() {
        let s = fig4();
        let b = BasisSpec::with_a(4, 4, c(0.5, 0.0)).unwrap();
        let sys = assemble_with(&s, c(1.5, 0.0), &b, Sheet::Proper, &QuadratureConfig::default(), false).unwrap();
        for blk in [Block::Xx, Block::Zz] {
            let m = sys.block(blk);
            let n = linalg::max_abs(&m);
            assert!(linalg::max_abs(&(&m - m.adjoint())) < 1e-9 * n);
        }
        let xz = sys.block(Block::Xz);
        let zx = sys.block(Block::Zx);
        assert!(linalg::max_abs(&(&zx + xz.transpose())) < 1e-9 * linalg::max_abs(&xz).max(1e-300));
    }

    #[test]
    fn zero_contrast_rejected() {
        let s = StructureSpec::isotropic(c(0.0, 1.0), c(0.0, 1.0)).unwrap();
        let b = BasisSpec::with_a(2, 2, c(0.5, 0.0)).unwrap();
        let e = assemble(&s, c(1.5, 0.0), &b, Sheet::Proper, &QuadratureConfig::default()).unwrap_err();
        assert_eq!(e.to_string(), "degenerate structure: no line discontinuity");
    }

    #[test]
    fn off_mode_residual_is_large() {
        let s = fig4();
        let b = BasisSpec::new(6, 6, BasisStrategy::ModeMatched, c(1.2, 0.0), &s).unwrap();
        let sys = assemble(&s, c(1.2, 0.0), &b, Sheet::Proper, &QuadratureConfig::default()).unwrap();
        assert!(sys.dispersion_residual().norm() > 1e-3);
        let ns = sys.null_space_coefficients();
        assert!(!ns.is_well_separated() || ns.sigma_min > 1e-3 * ns.sigma_max);
    }

    #[test]
    fn conjugation_symmetry_for_lossless_fixed_basis() {
        let s = fig4();
        let b = BasisSpec::with_a(3, 3, c(0.5, 0.0)).unwrap();
        let q = QuadratureConfig::default();
        let f = residual_fn(&s, &b, Sheet::Proper, &q);
        for i in 0..10 {
            let kz = c(1.3 + 0.15 * i as f64, -0.02 - 0.01 * i as f64);
            let r1 = f(kz).unwrap();
            let r2 = f(kz.conj()).unwrap();
            assert!((r2 - r1.conj()).norm() < 1e-8 * r1.norm().max(1e-3), "{kz}: {r1} vs {r2}");
        }
    }
}
