use std::hint::black_box;

use beamselect::experiments::{run_sweep, Algorithm, SweepConfig};
use beamselect::selection::{exhaustive_select, greedy_select, sector_select};
use beamselect::bound_constants;
use beamselect_bench::fixture;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn exhaustive(c: &mut Criterion) {
    let mut group = c.benchmark_group("exhaustive");
    for k in [8, 12, 16] {
        let h = fixture(k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &h, |b, h| {
            b.iter(|| exhaustive_select(black_box(h)).unwrap())
        });
    }
    group.finish();
}

fn greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy");
    for k in [12, 100, 1000] {
        let h = fixture(k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &h, |b, h| {
            b.iter(|| greedy_select(black_box(h)))
        });
    }
    group.finish();
}

fn sector(c: &mut Criterion) {
    let consts = bound_constants();
    let h = fixture(10_000);
    c.bench_function("sector/10000", |b| {
        b.iter(|| sector_select(black_box(&h), consts.r_star, consts.alpha_star).unwrap())
    });
}

fn sweep(c: &mut Criterion) {
    let config = SweepConfig::new(vec![2, 4, 8], 200, 1).with_algorithms(vec![
        Algorithm::Exhaustive,
        Algorithm::Greedy,
        Algorithm::SingleBest,
    ]);
    c.bench_function("sweep/small", |b| b.iter(|| run_sweep(black_box(&config)).unwrap()));
}

criterion_group!(benches, exhaustive, greedy, sector, sweep);
criterion_main!(benches);
