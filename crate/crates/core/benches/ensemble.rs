use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mirrorlang_core::dynamics::LangevinMode;
use mirrorlang_core::observables::{ensemble_run, EnsembleConfig};
use mirrorlang_core::{ExecPolicy, ReducedParams, TimeGrid};

fn config(policy: ExecPolicy, mode: LangevinMode) -> EnsembleConfig {
    let params = ReducedParams::new(1e-3, 5.0, 0.2, 1e-3).unwrap();
    let grid = TimeGrid::span(50.0, 0.02).unwrap();
    let mut cfg = EnsembleConfig::new(params, grid, mode, 256, 42).unwrap();
    cfg.policy = policy;
    cfg
}

fn ensembles(c: &mut Criterion) {
    let mut group = c.benchmark_group("ensemble_256_paths");
    group.sample_size(10);
    for (name, mode) in [
        ("vacuum", LangevinMode::Vacuum),
        ("thermal_white", LangevinMode::ThermalWhite),
    ] {
        for (label, policy) in [
            ("sequential", ExecPolicy::Sequential),
            ("parallel", ExecPolicy::Parallel { threads: None }),
        ] {
            let cfg = config(policy, mode);
            group.bench_with_input(BenchmarkId::new(label, name), &cfg, |b, cfg| {
                b.iter(|| ensemble_run(cfg).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, ensembles);
criterion_main!(benches);
