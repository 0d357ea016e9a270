use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qready_bench::random_solutions;
use qready_core::analytics::{hierarchical_cluster, DistanceMatrix, Linkage};

fn distances(c: &mut Criterion) {
    let mut group = c.benchmark_group("distance_matrix");
    group.sample_size(10);
    for k in [100, 700] {
        let xs = random_solutions(3, k, 2319);
        let refs: Vec<_> = xs.iter().collect();
        group.bench_with_input(BenchmarkId::from_parameter(k), &refs, |b, refs| {
            b.iter(|| black_box(DistanceMatrix::from_solutions(refs).unwrap()))
        });
    }
    group.finish();
}

fn clustering(c: &mut Criterion) {
    let mut group = c.benchmark_group("average_linkage");
    group.sample_size(10);
    for k in [100, 700] {
        let xs = random_solutions(4, k, 800);
        let m = DistanceMatrix::from_solutions(&xs.iter().collect::<Vec<_>>()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &m, |b, m| {
            b.iter(|| black_box(hierarchical_cluster(m, Linkage::Average)))
        });
    }
    group.finish();
}

criterion_group!(benches, distances, clustering);
criterion_main!(benches);
