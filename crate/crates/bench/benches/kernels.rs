use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pue_bench::*;
use pue_core::structures::two_level_staircase;
use pue_core::{
    approx_static_entropies, box_simplex_maximize, hat_partition, transfinite_sequence, ApproxOptions, Engine,
    IntervalSystem,
};
use std::hint::black_box;

fn join_walk(c: &mut Criterion) {
    let s = full_shift();
    let mu = skewed_markov(&s);
    let phi = smoothed(&s, 2);
    let mut group = c.benchmark_group("metric_trace_smoothed_depth2");
    for horizon in [4, 6, 8] {
        for (label, engine) in [("parallel", Engine::default()), ("serial", Engine::serial())] {
            group.bench_with_input(BenchmarkId::new(label, horizon), &horizon, |b, &n| {
                b.iter(|| engine.local_metric_entropy(&mu, &phi, n).unwrap())
            });
        }
    }
    group.finish();

    let golden = golden_shift();
    let cyl = cylinders(&golden, 1);
    c.bench_function("topological_trace_golden_n20", |b| {
        b.iter(|| Engine::default().local_topological_entropy(&cyl, black_box(20)).unwrap())
    });
}

fn conditional(c: &mut Criterion) {
    let s = golden_shift();
    let phi = smoothed(&s, 2);
    let psi = cylinders(&s, 2);
    c.bench_function("conditional_levels_golden_n8", |b| {
        b.iter(|| Engine::default().conditional_levels(&phi, &psi, None, black_box(8)).unwrap())
    });
    let family: Vec<_> = (1..=4).map(|k| cylinders(&s, k)).collect();
    c.bench_function("tail_matrix_golden_depths4_n6", |b| {
        b.iter(|| Engine::default().tail_entropy_estimate(&family, black_box(6)).unwrap())
    });
}

fn linear_program(c: &mut Criterion) {
    let mut group = c.benchmark_group("box_simplex");
    for n in [8, 64, 512] {
        let (obj, lower, upper) = lp_instance(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| box_simplex_maximize(&obj, &lower, &upper).unwrap())
        });
    }
    group.finish();
}

fn interval(c: &mut Criterion) {
    let system = IntervalSystem::doubling();
    let hats = hat_partition(8, 1 << 14).unwrap();
    let options = ApproxOptions::default();
    c.bench_function("doubling_hats8_grid2e14_n4", |b| {
        b.iter(|| approx_static_entropies(&system, &hats, black_box(4), &options).unwrap())
    });
}

fn structures(c: &mut Criterion) {
    let (family, candidate) = two_level_staircase(12).unwrap();
    c.bench_function("two_level_staircase_k12", |b| {
        b.iter(|| transfinite_sequence(&candidate, &family, black_box(16)).unwrap())
    });
}

criterion_group!(benches, join_walk, conditional, linear_program, interval, structures);
criterion_main!(benches);
