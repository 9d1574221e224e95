use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tact_core::{
    build_hamiltonian, build_state, dense_spectrum, find_zeros, find_zeros_with, full_spectrum, solve_sector, symmetric_functions,
    Precision, SectorLabel,
};

fn spectrum_vs_dense(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    for j in [10u32, 40, 100, 200] {
        group.bench_with_input(BenchmarkId::new("sectors", j), &j, |b, &j| {
            b.iter(|| full_spectrum(black_box(j), 1.0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("dense", j), &j, |b, &j| {
            b.iter(|| dense_spectrum(&build_hamiltonian(black_box(j))).unwrap())
        });
    }
    group.finish();
}

fn zeros(c: &mut Criterion) {
    let mut group = c.benchmark_group("zeros");
    for j in [20u32, 40] {
        let s = SectorLabel::new(j, 0, 0, 0).unwrap();
        let sol = solve_sector(s).unwrap().remove(0);
        group.bench_with_input(BenchmarkId::new("auto", j), &sol, |b, sol| b.iter(|| find_zeros(sol).unwrap()));
        group.bench_with_input(BenchmarkId::new("bits_256", j), &sol, |b, sol| {
            b.iter(|| find_zeros_with(sol, Precision::Bits(256)).unwrap())
        });
    }
    group.finish();
}

fn states(c: &mut Criterion) {
    let mut group = c.benchmark_group("states");
    for j in [8u32, 16] {
        let s = SectorLabel::new(j, 0, 0, 0).unwrap();
        let sol = solve_sector(s).unwrap().remove(0);
        let sym = symmetric_functions(&sol).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(j), &(sol, sym), |b, (sol, sym)| {
            b.iter(|| build_state(sol, sym).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spectrum_vs_dense, zeros, states);
criterion_main!(benches);
