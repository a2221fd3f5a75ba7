//! Parallel-vs-sequential comparison suite.  Run once with the default
//! features and once with `--no-default-features`; the benchmark IDs carry
//! the active mode, so the two reports land side by side:
//!
//!     cargo bench -p beiterlab
//!     cargo bench -p beiterlab --no-default-features

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use beiterlab::beiter::{delta_lower_estimate, find_counterexample};
use beiterlab::cyclotomic::ternary_height_with;
use beiterlab::sweeps::{bzdega_sweep, rect_lemma_sweep, theorem1_sweep, weil_exhaustive};

fn mode() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    }
}

fn bench_ternary_height(c: &mut Criterion) {
    let mut g = c.benchmark_group("ternary_height");
    for &(p, q, r) in &[(11u64, 97u64, 211u64), (13, 241, 499), (17, 349, 1009)] {
        g.bench_with_input(
            BenchmarkId::new(mode(), format!("{p}x{q}x{r}")),
            &(p, q, r),
            |bch, &(p, q, r)| {
                let mut scratch = Vec::new();
                bch.iter(|| ternary_height_with(p, q, r, &mut scratch).unwrap());
            },
        );
    }
    g.finish();
}

fn bench_sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweeps");
    g.sample_size(10);
    g.bench_function(BenchmarkId::new(mode(), "theorem1_to_3000"), |b| {
        b.iter(|| theorem1_sweep(3, 3000));
    });
    g.bench_function(BenchmarkId::new(mode(), "weil_exhaustive_to_101"), |b| {
        b.iter(|| weil_exhaustive(3, 101));
    });
    g.bench_function(BenchmarkId::new(mode(), "rect_lemma_1009_x200"), |b| {
        b.iter(|| rect_lemma_sweep(1009, 1009, 200, 0));
    });
    g.bench_function(BenchmarkId::new(mode(), "bzdega_to_50000"), |b| {
        b.iter(|| bzdega_sweep(50_000).unwrap());
    });
    g.finish();
}

fn bench_searches(c: &mut Criterion) {
    let mut g = c.benchmark_group("searches");
    g.sample_size(10);
    g.bench_function(BenchmarkId::new(mode(), "counterexample_11"), |b| {
        b.iter(|| find_counterexample(11, 200, 2000).unwrap());
    });
    g.bench_function(BenchmarkId::new(mode(), "delta_11_q300"), |b| {
        b.iter(|| delta_lower_estimate(11, 300, 1500).unwrap());
    });
    g.finish();
}

criterion_group!(benches, bench_ternary_height, bench_sweeps, bench_searches);
criterion_main!(benches);
