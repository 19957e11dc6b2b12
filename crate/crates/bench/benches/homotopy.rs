use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use simpalg_core::symalg::symmetric_power;
use simpalg_core::{
    a_rs_tables, eilenberg_maclane, homotopy_dims, rank, sphere_homotopy, unnormalized_chains, PrimeField, Rationals,
};

fn linear_algebra(c: &mut Criterion) {
    let f2 = PrimeField::new(2).unwrap();
    let k = eilenberg_maclane(&f2, 2, 3, 7).unwrap();
    let chains = unnormalized_chains(&k).unwrap();
    let d = chains.boundary(6).clone();
    c.bench_function("rank of a K(2,3) boundary, F_2", |b| b.iter(|| rank(black_box(&d), &f2).unwrap()));
    c.bench_function("homotopy of K(2,3), F_2", |b| b.iter(|| homotopy_dims(black_box(&k)).unwrap()));
    let sym = symmetric_power(&eilenberg_maclane(&f2, 1, 2, 6).unwrap(), 3);
    c.bench_function("homotopy of Sym^3 K(1,2), F_2", |b| b.iter(|| homotopy_dims(black_box(&sym)).unwrap()));
}

fn spheres(c: &mut Criterion) {
    let mut g = c.benchmark_group("sphere homotopy");
    g.sample_size(10);
    let f2 = PrimeField::new(2).unwrap();
    g.bench_function("S(1,1) F_2 T=6 W=4", |b| b.iter(|| sphere_homotopy(&f2, 1, 1, 6, 4).unwrap()));
    g.bench_function("S(1,2) Q T=7 W=3", |b| b.iter(|| sphere_homotopy(&Rationals, 1, 2, 7, 3).unwrap()));
    g.finish();
}

fn cofibers(c: &mut Criterion) {
    let mut g = c.benchmark_group("bar cofiber");
    g.sample_size(10);
    g.bench_function("A<1,2> T=6 W=2", |b| b.iter(|| a_rs_tables(1, 2, 6, 2, 2).unwrap()));
    g.finish();
}

criterion_group!(benches, linear_algebra, spheres, cofibers);
criterion_main!(benches);
