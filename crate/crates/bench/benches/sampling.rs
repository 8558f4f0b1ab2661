use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use ctasep::continuum::{correlations_mc, p_mc};
use ctasep::markov::{mc_stationary, McConfig};
use ctasep::TypeVector;

fn continuum(c: &mut Criterion) {
    let mut g = c.benchmark_group("continuum mc");
    g.sample_size(10);
    g.bench_function("correlations n=6, 1e5", |b| {
        b.iter(|| correlations_mc(6, black_box(100_000), 7).unwrap())
    });
    g.bench_function("p_pi n=5, 1e5", |b| {
        b.iter(|| p_mc(5, black_box(100_000), 7).unwrap())
    });
    g.finish();
}

fn discrete(c: &mut Criterion) {
    let t = TypeVector::new(vec![1, 1, 1], 6).unwrap();
    let cfg = McConfig {
        samples: 100_000,
        ..McConfig::default()
    };
    let mut g = c.benchmark_group("tasep mc");
    g.sample_size(10);
    g.bench_function("m=111 N=6, 1e5", |b| {
        b.iter(|| mc_stationary(black_box(&t), &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, continuum, discrete);
criterion_main!(benches);
