use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ihc_core::simlab::{Cell, Method, NoiseModel, PreparedCell, DEFAULT_SEED};
use ihc_core::Execution;

fn replicates(c: &mut Criterion) {
    let mut group = c.benchmark_group("replicates");
    group.sample_size(10);
    for n in [500, 1000] {
        let cell = Cell::toeplitz(n, 0.5, 0.25, 0.4, NoiseModel::tridiagonal(0.4));
        let prepared = PreparedCell::new(&cell, &Method::STANDARD).unwrap();
        for (label, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(label, n), &exec, |b, &exec| {
                b.iter(|| prepared.run(64, DEFAULT_SEED, exec))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, replicates);
criterion_main!(benches);
