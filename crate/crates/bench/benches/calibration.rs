use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pcacal_bench::gyro_problem;
use pcacal_core::simulation::{run_monte_carlo, SimulationConfig};
use pcacal_core::{calibrate, truncated_svd, CalibrationOptions};

fn bench_calibrate(c: &mut Criterion) {
    let mut group = c.benchmark_group("calibrate");
    for n in [10usize, 20, 40, 80, 160] {
        let problem = gyro_problem(n, 1e-3, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &problem, |b, p| {
            b.iter(|| calibrate(black_box(p), &CalibrationOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_truncated_svd(c: &mut Criterion) {
    let problem = gyro_problem(160, 1e-3, 2);
    c.bench_function("truncated_svd 12x160", |b| {
        b.iter(|| truncated_svd(black_box(problem.readings()), 3).unwrap())
    });
}

fn bench_monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo_100_trials");
    group.sample_size(10);
    for parallel in [false, true] {
        let config = SimulationConfig {
            trials: 100,
            parallel,
            ..SimulationConfig::default()
        };
        let label = if parallel { "parallel" } else { "serial" };
        group.bench_function(label, |b| b.iter(|| run_monte_carlo(black_box(&config)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_calibrate, bench_truncated_svd, bench_monte_carlo);
criterion_main!(benches);
