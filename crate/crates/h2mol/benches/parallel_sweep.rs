//! Compares the thread-pool and sequential execution of a representative
//! sweep workload: exponent optimization at two dozen proton distances.
//! With the default `parallel` feature the first case fans out over
//! rayon; `--no-default-features` makes both paths sequential.

use criterion::{criterion_group, criterion_main, Criterion};
use h2mol::exec::{par_map, seq_map};
use h2mol::variational::optimize_alpha;
use h2mol::GainLossCoupling;

fn sweep_workload(c: &mut Criterion) {
    let g = GainLossCoupling::new(0.3).unwrap();
    let rs: Vec<f64> = (0..24).map(|i| 0.8 + 0.08 * i as f64).collect();
    let mut group = c.benchmark_group("alpha_sweep");
    group.sample_size(10);
    group.bench_function("thread_pool", |b| {
        b.iter(|| par_map(&rs, |&r| optimize_alpha(r, g).unwrap().0))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| seq_map(&rs, |&r| optimize_alpha(r, g).unwrap().0))
    });
    group.finish();
}

criterion_group!(benches, sweep_workload);
criterion_main!(benches);
