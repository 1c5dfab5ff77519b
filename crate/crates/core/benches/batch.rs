// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mipreopt::batch::{solve_batch, solve_batch_sequential};
use mipreopt::model::random::multi_knapsack;
use mipreopt::solver::ClockMode;
use mipreopt::SolverConfig;

fn batch(c: &mut Criterion) {
    let cfg = SolverConfig {
        clock: ClockMode::Deterministic {
            work_per_second: 1e6,
        },
        ..Default::default()
    };
    let mut group = c.benchmark_group("solve_batch");
    group.sample_size(10);
    for count in [4usize, 16] {
        let insts: Vec<_> = (0..count as u64)
            .map(|s| multi_knapsack(14, 3, s))
            .collect();
        group.bench_with_input(BenchmarkId::new("sequential", count), &insts, |b, insts| {
            b.iter(|| solve_batch_sequential(insts, &cfg, 1e6))
        });
        group.bench_with_input(BenchmarkId::new("parallel", count), &insts, |b, insts| {
            b.iter(|| solve_batch(insts, &cfg, 1e6))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
