use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use euler_spin_bench::top_in_gradient;
use euler_spin_core::classical_dynamics::rk4_step;
use euler_spin_core::quantum_evolution::{evolve, FieldDrive, SpinHamiltonian};
use euler_spin_core::spin_basis::{inner_product_with, wigner_harmonic};
use euler_spin_core::{EulerAngles, Frame, GroupQuadrature, SpinAlgebra, SpinLabel, SpinorState, Vec3};

fn operators(c: &mut Criterion) {
    let sa = SpinAlgebra::default();
    let f = wigner_harmonic(&SpinLabel::new(3, 1, -1).unwrap()).unwrap();
    let at = EulerAngles::new(0.4, 1.1, -0.7);
    c.bench_function("commutator_residual s=3/2", |b| {
        b.iter(|| sa.commutator_residual(1, 2, Frame::BodyFixed, black_box(&f), &at).unwrap())
    });
    c.bench_function("spin_squared value s=3/2", |b| {
        b.iter(|| sa.spin_squared(black_box(&f)).value(&at).unwrap())
    });
}

fn quadrature(c: &mut Criterion) {
    let q = GroupQuadrature::default();
    let f = wigner_harmonic(&SpinLabel::new(2, 0, 2).unwrap()).unwrap();
    let g = wigner_harmonic(&SpinLabel::new(2, 0, 0).unwrap()).unwrap();
    c.bench_function("inner_product default grid", |b| {
        b.iter(|| inner_product_with(black_box(&f), black_box(&g), &q).unwrap())
    });
}

fn classical(c: &mut Criterion) {
    let (state, model, field) = top_in_gradient();
    c.bench_function("rk4_step gradient field", |b| {
        b.iter(|| rk4_step(black_box(&state), &model, &field, 1e-3).unwrap())
    });
}

fn spinor(c: &mut Criterion) {
    let model = euler_spin_core::ParticleModel::with_gtilde(1.0, 1.0, 1.0, 1.1, 1.0).unwrap();
    let stat = SpinHamiltonian::new(3, &model, FieldDrive::Constant(Vec3::new(0.2, 0.0, 0.8)), 1.0, 0.0).unwrap();
    let rot = SpinHamiltonian::new(
        3,
        &model,
        FieldDrive::Varying(std::sync::Arc::new(|t: f64| Vec3::new(0.3 * t.cos(), 0.3 * t.sin(), 0.8))),
        1.0,
        0.0,
    )
    .unwrap();
    let s0 = SpinorState::basis(3, 3).unwrap();
    c.bench_function("evolve 1000 steps static", |b| b.iter(|| evolve(&s0, &stat, 0.01, 10.0).unwrap()));
    c.bench_function("evolve 1000 steps rotating", |b| b.iter(|| evolve(&s0, &rot, 0.01, 10.0).unwrap()));
}

criterion_group!(benches, operators, quadrature, classical, spinor);
criterion_main!(benches);
