use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use lsys::numerics::solve;
use lsys::random::{self, seeded};
use lsys::systems::{random_fsystem_with, random_lsystem_with};
use lsys::timedomain::{simulate, InitialState, SimulationConfig};
use lsys::{c, couple_lf, ComplexMatrix};

fn bench_solve(cr: &mut Criterion) {
    let mut rng = seeded(1);
    for n in [4, 16, 64] {
        let a = &random::complex_matrix(&mut rng, n, n) + &ComplexMatrix::identity(n).scale(c(n as f64, 0.0));
        let b = random::complex_matrix(&mut rng, n, 1);
        cr.bench_function(&format!("solve_{n}"), |bn| bn.iter(|| solve(black_box(&a), black_box(&b)).unwrap()));
    }
}

fn bench_transfer(cr: &mut Criterion) {
    let mut rng = seeded(2);
    let j = ComplexMatrix::identity(2);
    let l = random_lsystem_with(&mut rng, 6, &j).unwrap();
    let f = random_fsystem_with(&mut rng, 6, &j).unwrap();
    let lf = couple_lf(&l, &f).unwrap();
    let z = c(0.3, 1.7);
    cr.bench_function("transfer_n6_m2", |bn| bn.iter(|| l.transfer(black_box(z)).unwrap()));
    cr.bench_function("lf_transfer_n12_m2", |bn| bn.iter(|| lf.transfer(black_box(z)).unwrap()));
}

fn bench_simulate(cr: &mut Criterion) {
    let mut rng = seeded(3);
    let j = ComplexMatrix::identity(1);
    let l = random_lsystem_with(&mut rng, 4, &j).unwrap();
    let dt = 0.05 / l.a().norm_inf();
    let cfg = SimulationConfig::new(c(0.5, 0.0), ComplexMatrix::identity(1), 200.0 * dt, dt, InitialState::Stationary);
    cr.bench_function("simulate_200_steps", |bn| bn.iter(|| simulate(black_box(&l), &cfg).unwrap()));
}

criterion_group!(benches, bench_solve, bench_transfer, bench_simulate);
criterion_main!(benches);
