use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qready_bench::{random_qubo, random_solutions};
use qready_core::{sample, SamplerParams, Setting};

fn flip_delta(c: &mut Criterion) {
    let mut group = c.benchmark_group("flip_delta");
    for (n, density) in [(200, 0.5), (2000, 0.005)] {
        let q = random_qubo(7, n, density);
        let x = random_solutions(8, 1, n).remove(0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut i = 0;
            b.iter(|| {
                i = (i + 1) % n;
                black_box(q.flip_delta(&x, i).unwrap())
            })
        });
    }
    group.finish();
}

fn tabu_moves(c: &mut Criterion) {
    let mut group = c.benchmark_group("tabu_10k_moves");
    group.sample_size(10);
    for (n, density) in [(100, 0.5), (1000, 0.01)] {
        let q = random_qubo(11, n, density);
        let params = SamplerParams {
            time_limit: 60.0,
            num_starts: Setting::Fixed(1),
            max_moves: Some(10_000),
            ..Default::default()
        };
        group.bench_function(BenchmarkId::from_parameter(n), |b| b.iter(|| black_box(sample(&q, &params).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, flip_delta, tabu_moves);
criterion_main!(benches);
