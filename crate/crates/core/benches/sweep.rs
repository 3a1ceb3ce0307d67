//! Sequential vs parallel batch execution of a parameter sweep.
//!
//! Run with `cargo bench -p spikearm`. The workload is a 12-trial sweep of
//! 2.5 s step responses; the parallel path should win on any multi-core
//! host while producing identical traces.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use spikearm::experiment::{
    build_trials, resolve, run_trials_parallel, run_trials_sequential, ConfigFile,
};

const SWEEP_CONFIG: &str = r#"
schema_version = 1

[experiment]
kind = "param_sweep"
duration_ms = 2500.0

[plant]
kind = "kinematic"
joints = 2

[schedule]
kind = "step"
step_targets = [0.8, -0.5]

[sweep]
parameter = "initial_facilitation"
values = [0.02, 0.05, 0.08, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5]
"#;

fn bench_sweep(c: &mut Criterion) {
    let cfg = ConfigFile::from_toml_str(SWEEP_CONFIG, "bench.toml").unwrap();
    let resolved = resolve(&cfg).unwrap();
    let specs = build_trials(&cfg, &resolved).unwrap();

    // The two paths must agree before timing them.
    let seq: Vec<_> = run_trials_sequential(&resolved, &specs)
        .into_iter()
        .map(|r| r.unwrap())
        .collect();
    let par: Vec<_> = run_trials_parallel(&resolved, &specs)
        .into_iter()
        .map(|r| r.unwrap())
        .collect();
    assert_eq!(seq, par);

    let mut group = c.benchmark_group("sweep_batch");
    group.sample_size(10);
    group.bench_with_input(
        BenchmarkId::new("sequential", specs.len()),
        &specs,
        |b, specs| {
            b.iter(|| run_trials_sequential(&resolved, specs));
        },
    );
    group.bench_with_input(
        BenchmarkId::new("parallel", specs.len()),
        &specs,
        |b, specs| {
            b.iter(|| run_trials_parallel(&resolved, specs));
        },
    );
    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
