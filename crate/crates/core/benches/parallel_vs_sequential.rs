use std::hint::black_box;

use conflab_core::loewner::{swallow_race, RaceConfig};
use conflab_core::par::{count_trials_with, Execution};
use conflab_core::paths::srw_nonintersection_mc_with;
use conflab_core::percolation::{crossing_exists, sample_bonds, Crossing};
use conflab_core::RngStream;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn percolation_crossing(c: &mut Criterion) {
    let mut group = c.benchmark_group("percolation-crossing");
    let rng = RngStream::from_seed(1);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 64), &exec, |b, &exec| {
            b.iter(|| {
                count_trials_with(exec, 200, |k| {
                    let cfg = sample_bonds(129, 65, 0.5, &mut rng.derive(k as u64).rng()).expect("valid size");
                    crossing_exists(&cfg, Crossing::LeftRight)
                })
            })
        });
    }
    group.finish();
}

fn srw_nonintersection(c: &mut Criterion) {
    let mut group = c.benchmark_group("srw-nonintersection");
    let rng = RngStream::from_seed(2);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 256), &exec, |b, &exec| {
            b.iter(|| srw_nonintersection_mc_with(exec, black_box(256), 2_000, rng).expect("valid parameters"))
        });
    }
    group.finish();
}

fn sle_swallow_race(c: &mut Criterion) {
    let mut group = c.benchmark_group("sle-swallow-race");
    let rng = RngStream::from_seed(3);
    let cfg = RaceConfig::default();
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "1:1"), &exec, |b, &exec| {
            b.iter(|| count_trials_with(exec, 500, |k| swallow_race(1.0, 1.0, &cfg, &mut rng.derive(k as u64).rng()).0))
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = percolation_crossing, srw_nonintersection, sle_swallow_race
}

criterion_main!(benches);
