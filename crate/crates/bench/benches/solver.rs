use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use linewave::fields::{solve_mode, tangential_field};
use linewave::mom::{assemble, residual_fn};
use linewave::rootfind::{find_root, RootSearchConfig};
use linewave::{QuadratureConfig, Sheet};
use linewave_bench::*;

fn assembly(c: &mut Criterion) {
    let q = QuadratureConfig::default();
    let s = bound_structure();
    let mut group = c.benchmark_group("assemble");
    for n in [4, 8, 16] {
        let b = mode_matched(n, &s, BOUND_KZ);
        group.bench_with_input(BenchmarkId::new("bound", n), &n, |bench, _| {
            bench.iter(|| assemble(&s, BOUND_KZ, &b, Sheet::Proper, &q).unwrap())
        });
    }
    let l = leaky_structure();
    let b = mode_matched(8, &l, LEAKY_KZ);
    group.bench_function("leaky/8", |bench| bench.iter(|| assemble(&l, LEAKY_KZ, &b, Sheet::Proper, &q).unwrap()));
    group.finish();
}

fn residual(c: &mut Criterion) {
    let q = QuadratureConfig::default();
    let s = bound_structure();
    let b = mode_matched(8, &s, BOUND_KZ);
    let f = residual_fn(&s, &b, Sheet::Proper, &q);
    c.bench_function("residual/bound/8", |bench| bench.iter(|| f(BOUND_KZ).unwrap()));
}

fn root(c: &mut Criterion) {
    let q = QuadratureConfig::default();
    let s = bound_structure();
    let b = mode_matched(8, &s, BOUND_KZ);
    let f = residual_fn(&s, &b, Sheet::Proper, &q);
    let cfg = RootSearchConfig { real_axis_first: true, ..RootSearchConfig::with_seed(linewave::c(2.4, 0.0)) };
    let mut group = c.benchmark_group("find_root");
    group.sample_size(10);
    group.bench_function("bound/8", |bench| bench.iter(|| find_root(&f, &cfg).unwrap()));
    group.finish();
}

fn field(c: &mut Criterion) {
    let q = QuadratureConfig::default();
    let s = bound_structure();
    let b = mode_matched(10, &s, BOUND_KZ);
    let cfg = RootSearchConfig { real_axis_first: true, ..RootSearchConfig::with_seed(linewave::c(2.4, 0.0)) };
    let sol = solve_mode(&s, &b, Sheet::Proper, &q, &cfg).unwrap();
    let grid: Vec<f64> = (0..21).map(|i| -0.5 + 0.05 * i as f64).collect();
    let mut group = c.benchmark_group("field");
    group.sample_size(10);
    group.bench_function("bound/10/21pts", |bench| bench.iter(|| tangential_field(&sol, &grid, 0.0).unwrap()));
    group.finish();
}

criterion_group!(benches, assembly, residual, root, field);
criterion_main!(benches);
