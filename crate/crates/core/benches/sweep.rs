use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ccn_sim::dynamics::IntegratorConfig;
use ccn_sim::scenarios::{initial_superposition, sweep_jprime, sweep_jprime_sequential, DEFAULT_J_PRIMES};
use ccn_sim::spin_model::ChainParams;

fn sweep(c: &mut Criterion) {
    let base = ChainParams::reference(0.1);
    let initial = initial_superposition();
    let mut group = c.benchmark_group("jprime_sweep");
    group.sample_size(10);

    for dt in [1e-4, 1e-5] {
        let cfg = IntegratorConfig::new(dt, 10_000).unwrap();
        group.bench_with_input(BenchmarkId::new("sequential", dt), &cfg, |b, cfg| {
            b.iter(|| sweep_jprime_sequential(&base, &DEFAULT_J_PRIMES, &initial, cfg).unwrap())
        });
        // Identical to `sequential` when built without the `parallel` feature.
        group.bench_with_input(BenchmarkId::new("default", dt), &cfg, |b, cfg| {
            b.iter(|| sweep_jprime(&base, &DEFAULT_J_PRIMES, &initial, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
