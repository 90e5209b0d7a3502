use criterion::{criterion_group, criterion_main, Criterion};
use isosurf_core::motion::evaluate_jet;
use isosurf_core::{compose, evaluate, MotionSubgroup, Signature};
use std::hint::black_box;

fn bench_subgroup(c: &mut Criterion) {
    let simply = MotionSubgroup::new(Signature::SimplyIsotropic, 0.7, 0.3, -0.2, 0.4, 0.1, 0.5);
    let pseudo = MotionSubgroup {
        sig: Signature::PseudoIsotropic,
        ..simply
    };
    let series = MotionSubgroup {
        phi: 1e-6,
        ..simply
    };

    c.bench_function("evaluate simply", |b| {
        b.iter(|| evaluate(black_box(&simply), black_box(1.3)))
    });
    c.bench_function("evaluate pseudo", |b| {
        b.iter(|| evaluate(black_box(&pseudo), black_box(1.3)))
    });
    c.bench_function("evaluate series branch", |b| {
        b.iter(|| evaluate(black_box(&series), black_box(1.3)))
    });
    c.bench_function("evaluate_jet", |b| {
        b.iter(|| evaluate_jet(black_box(&simply), black_box(1.3)))
    });
    let (m1, m2) = (evaluate(&simply, 0.4), evaluate(&simply, -1.1));
    c.bench_function("compose", |b| {
        b.iter(|| compose(black_box(&m1), black_box(&m2)))
    });
}

criterion_group!(benches, bench_subgroup);
criterion_main!(benches);
