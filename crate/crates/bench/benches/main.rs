//! criterion benches for the hot paths: cyclotomic factorization, toric
//! presentation recursion, dual vertex enumeration, and the census oracle.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use eulerprod_core::counting::nth_power_census;
use eulerprod_core::euler::factorize;
use eulerprod_core::polyhedra::{dual, PointSet};
use eulerprod_core::toric::{analytic_data, presentation, presentation_an};
use eulerprod_core::{ExponentVector, Int, SparseSeries, ToricMatrix};

fn bench_factorize(c: &mut Criterion) {
    // 1/(1 - x - y): every cyclotomic weight contributes
    let mut h = SparseSeries::one(2).with_cutoff(12);
    let lin = SparseSeries::from_terms(
        2,
        vec![
            (ExponentVector::unit(2, 0), Int::from(1)),
            (ExponentVector::unit(2, 1), Int::from(1)),
        ],
    )
    .unwrap();
    h = h.sub(&lin).unwrap().invert_unit(12).unwrap();
    c.bench_function("factorize_fibonacci_12", |b| {
        b.iter(|| factorize(black_box(&h), 12, None).unwrap())
    });
}

fn bench_presentation(c: &mut Criterion) {
    let a3 = ToricMatrix::an_matrix(3);
    c.bench_function("presentation_cubes_recursive", |b| {
        b.iter(|| presentation(black_box(&a3), 64).unwrap())
    });
    c.bench_function("presentation_cubes_closed_form", |b| {
        b.iter(|| presentation_an(black_box(3)))
    });
}

fn bench_dual(c: &mut Criterion) {
    let (p, _) = presentation_an(3);
    let a3 = ToricMatrix::an_matrix(3);
    c.bench_function("analytic_data_cubes", |b| {
        b.iter(|| analytic_data(black_box(&p), &a3).unwrap())
    });
    // dual of the positive part of a random-looking slab of points
    let pts: Vec<ExponentVector> = (0..5u32)
        .flat_map(|i| (0..5u32).map(move |j| ExponentVector::new(vec![i + 1, j + 1, (i * j) % 4 + 1])))
        .collect();
    let ps = PointSet::new(3, pts).unwrap();
    c.bench_function("dual_5x5_grid", |b| b.iter(|| dual(black_box(&ps)).unwrap()));
}

fn bench_census(c: &mut Criterion) {
    c.bench_function("cube_census_10k", |b| {
        b.iter(|| nth_power_census(black_box(3), 10_000).unwrap())
    });
}

criterion_group!(
    benches,
    bench_factorize,
    bench_presentation,
    bench_dual,
    bench_census
);
criterion_main!(benches);
