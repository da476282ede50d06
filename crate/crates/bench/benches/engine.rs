//! Benchmarks for the hot paths: graded multiplication, the Leibniz
//! application of a summed derivation, the tower recursion, and the Atiyah
//! matrix with its first Chern class.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use algebroid_bench::dense_spec;
use algebroid_core::atiyah::{atiyah_matrix, chern_class, LiftedState};
use algebroid_core::element::Element;
use algebroid_core::fedosov::{check_nilpotency, RecursionState, Sector};
use algebroid_core::generator::Gen;
use algebroid_core::poly::BasePoly;

fn big_element(nv: usize) -> Element {
    let x1 = BasePoly::var(nv, 0);
    let x2 = BasePoly::var(nv, 1);
    let mut e = Element::zero(nv);
    for i in 0..2u16 {
        for j in 0..2u16 {
            e.add_assign(&Element::monomial(
                &x1 * &x2,
                &[Gen::Dx(i), Gen::Y(j), Gen::Y(j), Gen::V(0)],
            ));
            e.add_assign(&Element::monomial(
                x2.clone(),
                &[Gen::Y(i), Gen::Y(j), Gen::Dy(i), Gen::Dv(1)],
            ));
        }
    }
    e
}

fn bench_multiply(c: &mut Criterion) {
    let a = big_element(2);
    let b = big_element(2);
    c.bench_function("element_multiply", |bench| {
        bench.iter(|| black_box(&a) * black_box(&b))
    });
}

fn bench_apply(c: &mut Criterion) {
    let spec = dense_spec();
    let state = RecursionState::solve(&spec, 4).unwrap();
    let d = state.d_total();
    let e = big_element(2);
    c.bench_function("derivation_apply", |bench| {
        bench.iter(|| d.apply(black_box(&e)))
    });
}

fn bench_solve(c: &mut Criterion) {
    let spec = dense_spec();
    c.bench_function("solve_towers_w4", |bench| {
        bench.iter(|| RecursionState::solve(black_box(&spec), 4).unwrap())
    });
}

fn bench_nilpotency(c: &mut Criterion) {
    let spec = dense_spec();
    let state = RecursionState::solve(&spec, 4).unwrap();
    c.bench_function("nilpotency_total_w4", |bench| {
        bench.iter(|| check_nilpotency(black_box(&state), Sector::Total))
    });
}

fn bench_atiyah(c: &mut Criterion) {
    let spec = dense_spec();
    let state = RecursionState::solve(&spec, 4).unwrap();
    let lift = LiftedState::new(&state);
    c.bench_function("atiyah_c1_w4", |bench| {
        bench.iter(|| {
            let at = atiyah_matrix(black_box(&lift));
            chern_class(&at, 1)
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_multiply, bench_apply, bench_solve, bench_nilpotency, bench_atiyah
}
criterion_main!(benches);
