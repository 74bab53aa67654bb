use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use sawqed::cavity::{depth_grid, q_sweep, SweepGeometry};
use sawqed::couplings::{coop_table, dqd_spectrum};
use sawqed::dynamics::transfer::DEFAULT_HORIZON;
use sawqed::dynamics::{
    optimal_pulse, transfer_run, HilbertSpec, NoiseSpec, Protocol, QubitState, TransferConfig, TransferPulses,
};
use sawqed::rayleigh::{default_window, solve_110, solve_general};
use sawqed::zeropoint::{zero_point_table, ModeGeometry};
use sawqed::Catalog;

fn solvers(c: &mut Criterion) {
    let cat = Catalog::builtin();
    let gaas = cat.get("GaAs").unwrap();
    c.bench_function("rayleigh_110_gaas", |b| b.iter(|| solve_110(black_box(gaas)).unwrap()));
    let window = default_window(gaas).unwrap();
    c.bench_function("rayleigh_general_gaas_30deg", |b| {
        b.iter(|| solve_general(black_box(gaas), 30f64.to_radians(), window).unwrap())
    });
    c.bench_function("zero_point_table", |b| {
        b.iter(|| zero_point_table(&cat, &ModeGeometry::default()).unwrap())
    });
    let linbo3 = cat.get("LiNbO3").unwrap();
    let grid = depth_grid(1e-3, 0.05);
    c.bench_function("cavity_sweep_50", |b| {
        b.iter(|| q_sweep(linbo3, 300, &grid, &SweepGeometry::default(), 3e9).unwrap())
    });
    c.bench_function("coop_table", |b| b.iter(|| coop_table().unwrap()));
    c.bench_function("dqd_spectrum", |b| {
        b.iter(|| dqd_spectrum(black_box(8e-25), -1.1e-24, 1.6e-25))
    });
}

fn dynamics(c: &mut Criterion) {
    c.bench_function("optimal_pulse", |b| {
        b.iter(|| optimal_pulse(1.0, DEFAULT_HORIZON).unwrap())
    });
    let pulses = TransferPulses::new(Protocol::Optimal, 1.0, DEFAULT_HORIZON).unwrap();
    let noise = NoiseSpec::cavity_only(1.0, 0.1);
    let mut group = c.benchmark_group("transfer");
    group.sample_size(10);
    for cutoff in [1, 2] {
        let cfg = TransferConfig {
            space: HilbertSpec::cascaded(cutoff),
            ..TransferConfig::default()
        };
        group.bench_function(format!("cutoff_{cutoff}"), |b| {
            b.iter(|| transfer_run(&pulses, &noise, [0.0, 0.0], &QubitState::minus(), &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, solvers, dynamics);
criterion_main!(benches);
