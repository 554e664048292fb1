use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C64;

use rtsym_core::diag::reconstruct_h2;
use rtsym_core::sweep::{SweepConfig, SweepRange, Tolerances};
use rtsym_core::{
    build_h2, build_h3, eigenspectrum, find_rt_angle, is_symmetric, run_sweep, AntiunitarySpec,
    FockSpace, HamiltonianSpec, Term,
};

fn bench_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_h2");
    for cutoff in [8usize, 12, 16] {
        let space = FockSpace::two_mode(cutoff).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(cutoff), &space, |b, space| {
            b.iter(|| build_h2(black_box(space), 1.0, 0.1, 0.6).unwrap())
        });
    }
    group.finish();
}

fn bench_eigenspectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigenspectrum");
    group.sample_size(20);
    for cutoff in [8usize, 12] {
        let space = FockSpace::two_mode(cutoff).unwrap();
        let h = build_h2(&space, 1.0, 0.1, 0.6).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(cutoff), &h, |b, h| {
            b.iter(|| eigenspectrum(black_box(h)).unwrap())
        });
    }
    group.finish();
}

fn bench_certification(c: &mut Criterion) {
    let space = FockSpace::two_mode(12).unwrap();
    let h = build_h2(&space, 1.0, 0.1, 0.6).unwrap();
    let pt = AntiunitarySpec::pt(&space).unwrap();
    c.bench_function("certify_pt_cutoff_12", |b| {
        b.iter(|| is_symmetric(black_box(&h), &pt, 1e-10).unwrap())
    });
}

fn bench_angle_search(c: &mut Criterion) {
    let space = FockSpace::two_mode(6).unwrap();
    let h = build_h3(&space, 0.2, C64::new(1.0, 0.0), 0.1, 0.7, 0.4).unwrap();
    let mut group = c.benchmark_group("find_rt_angle");
    group.sample_size(10);
    group.bench_function("cutoff_6", |b| {
        b.iter(|| find_rt_angle(black_box(&h), 1e-10).unwrap())
    });
    group.finish();
}

fn bench_reconstruction(c: &mut Criterion) {
    let space = FockSpace::two_mode(10).unwrap();
    c.bench_function("reconstruct_h2_cutoff_10", |b| {
        b.iter(|| reconstruct_h2(black_box(&space), 1.0, 0.6, 0.1).unwrap())
    });
}

fn bench_sweep(c: &mut Criterion) {
    let config = SweepConfig {
        hamiltonian: HamiltonianSpec::new(vec![
            Term::LinearCoupling { g: C64::new(1.0, 0.0) },
            Term::DrivePhased { eps: 0.1, phi: 0.0 },
            Term::GainLoss { kappa: 0.0 },
        ]),
        sweep: SweepRange { parameter: "kappa".to_string(), lo: 0.2, hi: 0.8, steps: 5 },
        cutoff: 8,
        tolerances: Tolerances::default(),
        output: None,
    };
    let mut group = c.benchmark_group("run_sweep");
    group.sample_size(10);
    group.bench_function("5_points_cutoff_8", |b| {
        b.iter(|| run_sweep(black_box(&config)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_build,
    bench_eigenspectrum,
    bench_certification,
    bench_angle_search,
    bench_reconstruction,
    bench_sweep
);
criterion_main!(benches);
