//! Cross-checks between independent constructions.

use std::sync::Arc;

use proptest::prelude::*;

use simpalg_core::audit::{splitting_series, EnvelopeProfile, PiBound};
use simpalg_core::barcof::{
    a_rs_tables, attach_cofiber_cell, bar_diagonal, cofiber_homotopy, generator_power, les_feasibility, representing_map,
    AlgebraMap, LesVerdict,
};
use simpalg_core::series::{sphere_series_char0, sphere_series_charp};
use simpalg_core::symalg::cells::CellAlgebra;
use simpalg_core::symalg::homotopy::weight_homotopy;
use simpalg_core::symalg::sphere_algebra;
use simpalg_core::{Field, FieldSpec, GradedDims, Rationals};

/// Exactness by enumerating every assignment of ranks to the maps.
fn les_by_enumeration(a: &GradedDims, b: &GradedDims, c: &GradedDims) -> bool {
    let top = a.len().max(b.len()).max(c.len());
    let mut dims = Vec::new();
    for s in (0..top).rev() {
        dims.extend([a.get(s), b.get(s), c.get(s)]);
    }
    // maps[i]: term i → term i + 1; the outer maps into the first and out of the last term are zero.
    let maps = dims.len().saturating_sub(1);
    let mut ranks = vec![0usize; maps];
    loop {
        let exact = (0..dims.len()).all(|i| {
            let into = if i == 0 { 0 } else { ranks[i - 1] };
            let out = if i == maps { 0 } else { ranks[i] };
            into + out == dims[i]
        });
        if exact {
            return true;
        }
        let mut k = 0;
        loop {
            if k == maps {
                return false;
            }
            ranks[k] += 1;
            if ranks[k] <= dims[k].min(dims[k + 1]) {
                break;
            }
            ranks[k] = 0;
            k += 1;
        }
    }
}

fn dims(len: usize) -> impl Strategy<Value = GradedDims> {
    prop::collection::vec(0usize..3, len).prop_map(GradedDims)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn les_matches_enumeration(a in dims(2), b in dims(2), c in dims(2)) {
        prop_assert_eq!(les_feasibility(&a, &b, &c).is_feasible(), les_by_enumeration(&a, &b, &c));
    }
}

#[test]
fn les_examples() {
    let x = GradedDims(vec![1, 0, 2]);
    let zero = GradedDims::zeros(3);
    assert!(les_feasibility(&zero, &x, &x).is_feasible());
    let a = GradedDims::concentrated(4, 3, 1);
    assert_eq!(les_feasibility(&a, &zero, &zero), LesVerdict::Infeasible { position: 1, degree: 3, term: 'B' });
}

#[test]
fn sphere_cofibration_sequence() {
    // S(V, 2) → B → S(W, 3) with dim V = 2, dim W = 3: exactly the pairs with
    // dim H^Q_3 B − dim H^Q_2 B = dim W − dim V are possible.
    let (n, v, w) = (3, 2, 3);
    let a = GradedDims::concentrated(n + 1, n - 1, v);
    let c = GradedDims::concentrated(n + 1, n, w);
    for x in 0..=4 {
        for y in 0..=4 {
            let mut b = vec![0; n + 1];
            b[n] = x;
            b[n - 1] = y;
            let feasible = les_feasibility(&a, &GradedDims(b), &c).is_feasible();
            assert_eq!(feasible, x <= w && y <= v && x + v == w + y, "x = {x}, y = {y}");
        }
    }
}

#[test]
fn identity_class_and_cofiber() {
    let q = Rationals;
    let b = Arc::new(sphere_algebra(&q, 1, 2, 5, 1).unwrap());
    let f = representing_map(&b, 2, 1, vec![(0, q.one())]).unwrap();
    f.check().unwrap();
    assert_eq!(f.induced_class().unwrap(), vec![q.one()]);
    let h = cofiber_homotopy(&f, 2, 2).unwrap();
    assert_eq!(h.dims.0, vec![1, 0, 0, 0, 0]);
    assert!(h.flags.iter().all(|&x| x));
}

#[test]
fn square_class_is_represented() {
    let q = Rationals;
    let b = Arc::new(sphere_algebra(&q, 1, 2, 5, 2).unwrap());
    let x2 = generator_power(&b, 2, 2).unwrap();
    let f = representing_map(&b, 4, 2, x2).unwrap();
    f.check().unwrap();
    let class = f.induced_class().unwrap();
    assert_eq!(class.len(), 1);
    assert!(!q.is_zero(&class[0]));
    let z = AlgebraMap::zero(&b, 4, 2).unwrap();
    assert!(z.cycle().is_empty());
}

#[test]
fn bar_components_are_simplicial_and_grow_with_bounds() {
    let q = Rationals;
    let b = Arc::new(sphere_algebra(&q, 1, 2, 5, 2).unwrap());
    let f = representing_map(&b, 4, 2, generator_power(&b, 2, 2).unwrap()).unwrap();
    let mut previous: Option<Vec<Vec<usize>>> = None;
    for n in 0..=2 {
        let comps = bar_diagonal(&f, n, 3).unwrap();
        for c in &comps {
            c.validate().unwrap();
        }
        let levels: Vec<Vec<usize>> = comps.iter().map(|c| c.level_dims().to_vec()).collect();
        if let Some(prev) = &previous {
            for (lo, hi) in prev.iter().zip(&levels) {
                assert!(lo.iter().zip(hi).all(|(x, y)| x <= y));
            }
        }
        previous = Some(levels);
    }
    let w2 = cofiber_homotopy(&f, 2, 2).unwrap();
    let w3 = cofiber_homotopy(&f, 3, 3).unwrap();
    assert!(w2.dims.0.iter().zip(&w3.dims.0).all(|(x, y)| x <= y));
}

#[test]
fn bar_cofiber_agrees_with_cell_model() {
    for (r, s, t, w) in [(1, 1, 4, 2), (1, 2, 6, 2), (1, 3, 7, 3)] {
        let rep = a_rs_tables(r, s, t, w, w).unwrap();
        assert_eq!(rep.pi.dims, rep.pi_cell_model, "A<{r},{s}>");
        assert!(rep.mismatches().is_empty());
    }
}

#[test]
fn zero_map_cofiber_is_a_product_of_spheres() {
    let q = Rationals;
    for (m, n) in [(1, 2), (2, 2), (3, 2), (2, 1)] {
        let b = Arc::new(sphere_algebra(&q, 1, n, 5, 1).unwrap());
        let f = AlgebraMap::zero(&b, m, 1).unwrap();
        let h = cofiber_homotopy(&f, 2, 2).unwrap();
        let expected = sphere_series_char0(1, n, 4).unwrap().mul(&sphere_series_char0(1, m + 1, 4).unwrap()).unwrap();
        let got: Vec<u64> = h.dims.0.iter().map(|&d| d as u64).collect();
        assert_eq!(got, expected.coeffs(), "S({m}) → S({n})");
        assert!(h.flags.iter().all(|&x| x));
    }
}

#[test]
fn cell_model_of_the_square_map() {
    let q = Rationals;
    let b = Arc::new(sphere_algebra(&q, 1, 2, 5, 2).unwrap());
    let f = representing_map(&b, 4, 2, generator_power(&b, 2, 2).unwrap()).unwrap();
    let cell = attach_cofiber_cell(&f).unwrap();
    let (_, lin) = cell.linear_complex(None, 6).unwrap();
    assert_eq!(lin.homology_dims().0, vec![0, 0, 1, 0, 0, 1, 0]);
}

#[test]
fn two_stage_algebra_splits() {
    // S(ℓ, n-1) ⊗ S(ℓ, n) as a cell algebra with two cells, against the product of closed forms.
    let q = Rationals;
    for n in [3, 4] {
        let mut alg = CellAlgebra::new(&q, 2);
        alg.add_cell(n - 1, vec![1, 0], Vec::new()).unwrap();
        alg.add_cell(n, vec![0, 1], Vec::new()).unwrap();
        let t = 6;
        let w = t / (n - 1) + 1;
        let mut total = GradedDims::zeros(t);
        for d in 0..=w as u32 {
            total = total.add(&weight_homotopy(&alg, d, t, false).unwrap());
        }
        let mut dims = std::collections::BTreeMap::new();
        dims.insert(n - 1, 1);
        dims.insert(n, 1);
        let profile = EnvelopeProfile::new(FieldSpec::RATIONALS, dims, PiBound::Unbounded).unwrap();
        let s = splitting_series(&profile, t - 1).unwrap();
        let got: Vec<u64> = total.0.iter().map(|&d| d as u64).collect();
        assert_eq!(got, s.coeffs(), "n = {n}");
    }
}

#[test]
fn charp_series_starts_with_the_hurewicz_pattern() {
    for (q, n, p) in [(1, 1, 2), (2, 2, 2), (1, 3, 3)] {
        let c = sphere_series_charp(q, n, p, n + 1, 2).unwrap();
        let s = c.series.coeffs();
        assert_eq!(s[0], 1);
        assert!(s[1..n].iter().all(|&x| x == 0));
        assert_eq!(s[n], q as u64);
    }
    assert_eq!(sphere_series_charp(0, 2, 2, 4, 1).unwrap().series.coeffs(), &[1, 0, 0, 0, 0]);
}

#[test]
fn rejected_inputs() {
    assert!(a_rs_tables(0, 2, 6, 2, 2).is_err());
    assert!(a_rs_tables(1, 0, 6, 2, 2).is_err());
    let q = Rationals;
    let b = Arc::new(sphere_algebra(&q, 1, 2, 4, 1).unwrap());
    assert!(representing_map(&b, 2, 2, vec![(0, q.one())]).is_err());
}
