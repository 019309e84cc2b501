use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use magdeform::numerics::{dft_forward, gauss_legendre};
use magdeform::oscillator::{build_ho_operator, mehler_propagate, HOConfig, HoDeformation};
use magdeform::zonal::{deformed_zonal_surrogate, ZonalConfig};
use magdeform::{Complex64, Execution, UniformGrid, WaveField};

fn dft(c: &mut Criterion) {
    let mut group = c.benchmark_group("dft_forward");
    for n in [512usize, 2048, 8192] {
        let grid = UniformGrid::periodic_centered(10.0, n).unwrap();
        let field =
            WaveField::from_fn(grid, 0.01, |x| Complex64::new((-x * x).exp(), x.sin())).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &field, |b, f| {
            b.iter(|| dft_forward(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn eigensolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("ho_eigensolve");
    group.sample_size(10);
    for n in [256usize, 512] {
        let cfg = HOConfig::with_count(0.05, 0.5, 0.5, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| build_ho_operator(black_box(cfg), 0.25).eigen().unwrap())
        });
    }
    group.finish();
}

fn deformation(c: &mut Criterion) {
    let cfg = HOConfig::with_count(0.05, 0.5, 0.5, 512).unwrap();
    let quad = gauss_legendre(16, -0.5, 0.5).unwrap();
    let mut group = c.benchmark_group("ho_deformation_512");
    group.sample_size(10);
    for (name, exec) in [
        ("serial", Execution::Serial),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| HoDeformation::build(black_box(&cfg), &quad, exec).unwrap())
        });
    }
    group.finish();
}

fn mehler(c: &mut Criterion) {
    let cfg = HOConfig::with_count(0.02, 0.5, 0.5, 512).unwrap();
    c.bench_function("mehler_propagate", |b| {
        b.iter(|| mehler_propagate(black_box(&cfg), 0.25, 0.1).unwrap())
    });
}

fn zonal(c: &mut Criterion) {
    let mut group = c.benchmark_group("zonal_surrogate");
    for n in [100usize, 400] {
        let cfg = ZonalConfig::new(n, 0.1, 0.4).unwrap();
        let quad = cfg.circle_for(0.3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| deformed_zonal_surrogate(cfg, [0.2, -0.1], [0.01, 0.0], &quad).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dft, eigensolve, deformation, mehler, zonal);
criterion_main!(benches);
