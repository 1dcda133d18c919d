use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use overcoupled::{detect_peaks, solve_modes, sweep, DriveSpec, FrequencyGrid};
use overcoupled_bench::chain;

fn bench_solve_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_modes");
    for n in [3usize, 5, 16, 32] {
        let model = chain(n, 10.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &model, |b, model| {
            b.iter(|| solve_modes(black_box(model)).unwrap());
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep_2000pt");
    group.sample_size(20);
    for n in [3usize, 5, 16] {
        let model = chain(n, 10.0);
        let drive = DriveSpec {
            driven: 0,
            grid: FrequencyGrid::linear(3.2e6, 5.2e6, 2000).unwrap(),
        };
        group.bench_with_input(BenchmarkId::from_parameter(n), &model, |b, model| {
            b.iter(|| sweep(black_box(model), black_box(&drive)).unwrap());
        });
    }
    group.finish();
}

fn bench_detect_peaks(c: &mut Criterion) {
    let model = chain(5, 10.0);
    let drive = DriveSpec {
        driven: 0,
        grid: FrequencyGrid::linear(3.2e6, 5.2e6, 2000).unwrap(),
    };
    let mut group = c.benchmark_group("detect_peaks");
    group.sample_size(20);
    group.bench_function("five_coil_end", |b| {
        b.iter(|| detect_peaks(black_box(&model), black_box(&drive), 0.01).unwrap());
    });
    group.finish();
}

criterion_group!(benches, bench_solve_modes, bench_sweep, bench_detect_peaks);
criterion_main!(benches);
