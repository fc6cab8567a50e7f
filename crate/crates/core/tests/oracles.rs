//! Invariances checked through the full solver, plus the pinned fixtures.

use linewave::mom::residual_fn;
use linewave::reference::run_fixture_suite;
use linewave::rootfind::{find_root, RootSearchConfig};
use linewave::{c, BasisSpec, BasisStrategy, QuadratureConfig, Result, Sheet, StructureSpec, C64};

fn bound(s: &StructureSpec, n: usize, seed: f64) -> Result<C64> {
    let q = QuadratureConfig::default();
    let b = BasisSpec::new(n, n, BasisStrategy::ModeMatched, c(seed, 0.0), s)?;
    let cfg = RootSearchConfig { real_axis_first: true, window: (0.1, 0.1), ..RootSearchConfig::with_seed(c(seed, 0.0)) };
    let f = residual_fn(s, &b, Sheet::Proper, &q);
    let root = find_root(&f, &cfg)?.root;
    Ok(root)
}

#[test]
fn mirrored_structure_has_the_same_root() {
    let s = StructureSpec::isotropic(c(0.0, 1.0 / 3f64.sqrt()), c(0.0, -3f64.sqrt())).unwrap();
    let a = bound(&s, 8, 2.45).unwrap();
    let b = bound(&s.swapped(), 8, 2.45).unwrap();
    assert!((a - b).norm() < 1e-6, "{a} vs {b}");
}

// The basis lives on one side of the junction, so mirroring changes the
// discretization; the two roots only meet in the limit.
#[test]
fn mirrored_anisotropic_roots_converge_together() {
    let s = StructureSpec::rotated_capacitive(1.0, 0.6).unwrap();
    let gap = |n| (bound(&s, n, 3.55).unwrap() - bound(&s.swapped(), n, 3.55).unwrap()).norm();
    let (g16, g32) = (gap(16), gap(32));
    assert!(g32 < 1e-4 && g32 < 0.25 * g16, "gap {g16:.2e} at 16, {g32:.2e} at 32");
}

// Z -> 1/Z with the principal axes exchanged maps the capacitive axial
// structure at eps onto the inductive one at -eps.
#[test]
fn dual_structures_share_the_root() {
    for (eps, seed) in [(0.5, 2.82), (-0.5, 2.38)] {
        let a = bound(&StructureSpec::capacitive_axial(eps).unwrap(), 10, seed).unwrap();
        let b = bound(&StructureSpec::inductive_axial(-eps).unwrap(), 10, a.re).unwrap();
        assert!((a - b).norm() < 1e-6, "eps {eps}: {a} vs {b}");
    }
}

#[test]
fn fixture_suite_agrees_with_gauss_kronrod() {
    let reports = run_fixture_suite(&QuadratureConfig::default()).unwrap();
    assert!(reports.len() >= 5);
    for r in &reports {
        assert!(r.deviation < 1e-8, "{} deviates by {:.2e}", r.name, r.deviation);
    }
}
