//! Benchmarks: the explicit solve at several grid sizes, the convergence
//! sweep, and the zeta evaluator.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use volterra_bench::{constant_kernel_config, convolution_kernel_config};
use volterra_core::analysis::{convergence_sweep, exact_example1};
use volterra_core::oracles::zeta_open_interval;
use volterra_core::solver::solve;
use volterra_core::{Kernel, ProblemSpec};

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for n_panels in [128usize, 512, 2048] {
        group.bench_with_input(
            BenchmarkId::new("constant_m2", n_panels),
            &n_panels,
            |b, &n| {
                let cfg = constant_kernel_config(2.0, n);
                b.iter(|| solve(black_box(&cfg)).unwrap());
            },
        );
        group.bench_with_input(
            BenchmarkId::new("convolution_m2", n_panels),
            &n_panels,
            |b, &n| {
                let cfg = convolution_kernel_config(2.0, n);
                b.iter(|| solve(black_box(&cfg)).unwrap());
            },
        );
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    c.bench_function("convergence_sweep_m2_depths_1_to_8", |b| {
        let spec = ProblemSpec::new(2.0, Kernel::Constant(1.0), 0.001).unwrap();
        let depths: Vec<u32> = (1..=8).collect();
        b.iter(|| {
            convergence_sweep(
                black_box(&spec),
                0.001,
                &depths,
                &|x| exact_example1(2.0, x),
            )
            .unwrap()
        });
    });
}

fn bench_zeta(c: &mut Criterion) {
    c.bench_function("zeta_open_interval_0.5", |b| {
        b.iter(|| zeta_open_interval(black_box(0.5)).unwrap());
    });
}

criterion_group!(benches, bench_solve, bench_sweep, bench_zeta);
criterion_main!(benches);
