use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use ctasep::continuum::ArrangementCensus;
use ctasep::count::{g_w0_formula, mlq_census, GCensus, PositionVector, DEFAULT_MLQ_CAP};
use ctasep::markov::{stationary_direct, stationary_for_type};
use ctasep::tableaux::{fw_route_a, fw_route_b, gt_pattern_count_brute};
use ctasep::TypeVector;

fn stationary(c: &mut Criterion) {
    let t = TypeVector::new(vec![1, 1, 1], 5).unwrap();
    let mut g = c.benchmark_group("stationary m=111 N=5");
    g.sample_size(10);
    g.bench_function("rotation lumped", |b| {
        b.iter(|| stationary_for_type(black_box(&t)).unwrap())
    });
    g.bench_function("direct", |b| {
        b.iter(|| stationary_direct(black_box(&t)).unwrap())
    });
    g.finish();
}

fn census(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumeration");
    g.sample_size(10);
    let t = TypeVector::new(vec![1, 1, 1, 1], 6).unwrap();
    g.bench_function("mlq census m=1111 N=6", |b| {
        b.iter(|| mlq_census(black_box(&t), DEFAULT_MLQ_CAP).unwrap())
    });
    g.bench_function("G census n=4 N=7", |b| {
        b.iter(|| GCensus::new(4, 7, DEFAULT_MLQ_CAP).unwrap())
    });
    g.bench_function("arrangements n=4", |b| {
        b.iter(|| ArrangementCensus::compute(4, u128::MAX).unwrap())
    });
    g.bench_function("GT patterns n=6", |b| {
        b.iter(|| gt_pattern_count_brute(black_box(6)).unwrap())
    });
    g.finish();
}

fn formulas(c: &mut Criterion) {
    let b = PositionVector::new(vec![0, 3, 7, 9, 14, 20], 24).unwrap();
    c.bench_function("G_w0 determinant n=6", |bn| {
        bn.iter(|| g_w0_formula(black_box(&b)).unwrap())
    });
    let m = [2, 2, 2, 3, 4];
    c.bench_function("F_w prefix sum", |bn| {
        bn.iter(|| fw_route_a(black_box(&m)).unwrap())
    });
    c.bench_function("F_w hook content", |bn| {
        bn.iter(|| fw_route_b(black_box(&m)).unwrap())
    });
}

criterion_group!(benches, stationary, census, formulas);
criterion_main!(benches);
