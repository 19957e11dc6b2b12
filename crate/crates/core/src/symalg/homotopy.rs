//! Brute-force homotopy of sphere algebras, weight stability, and the
//! Hurewicz map of cell algebras.

use rustc_hash::FxHashMap;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::matrix::{rank_unchecked, HomologyBasis, Matrix, SparseVec};
use crate::simplicial::GradedDims;
use crate::surjection;
use crate::symalg::cells::{cell_of, gradings_of_weight, mask_of, sphere_cells, CellAlgebra};

/// A linear map `π_s(IA) → π_s(QA)` in chosen homology bases.
#[derive(Clone, Debug)]
pub struct HurewiczMap<F: Field> {
    degree: usize,
    matrix: Matrix<F>,
    rank: usize,
}

impl<F: Field> HurewiczMap<F> {
    pub fn new(degree: usize, matrix: Matrix<F>) -> Self {
        let rank = rank_unchecked(&matrix);
        HurewiczMap { degree, matrix, rank }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self) -> &Matrix<F> {
        &self.matrix
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_injective(&self) -> bool {
        self.rank == self.source_dim()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank == self.target_dim()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }
}

/// Homotopy of a sphere algebra summed over weights `0..=W`, with the
/// weight-`(W+1)` stability check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyReport {
    pub field: FieldSpec,
    pub q: usize,
    pub n: usize,
    /// Simplicial truncation: levels `0..=T` were used.
    pub truncation: usize,
    pub weight_bound: usize,
    /// Degrees `0..=certified_degree`.
    pub dims: GradedDims,
    /// Homotopy of each weight `0..=W`.
    pub by_weight: Vec<GradedDims>,
    /// Homotopy of weight `W + 1`, computed only for the stability flags.
    pub next_weight: GradedDims,
    pub certified_degree: usize,
    /// Entry `k` is true when weight `W + 1` contributes nothing in degrees `≤ k`.
    pub stable_flags: Vec<bool>,
}

impl HomotopyReport {
    /// Largest `k` with every degree `≤ k` weight-stable.
    pub fn stable_degree(&self) -> Option<usize> {
        self.stable_flags.iter().rposition(|&f| f)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "field": self.field.characteristic(),
            "q": self.q,
            "n": self.n,
            "T": self.truncation,
            "W": self.weight_bound,
            "dims": self.dims,
            "certified_degree": self.certified_degree,
            "stable_flags": self.stable_flags,
            "by_weight": self.by_weight,
        })
    }
}

/// Homotopy of one graded component, degrees `0..t` from levels `0..=t`.
pub fn component_homotopy<F: Field>(alg: &CellAlgebra<F>, grading: &[u32], t: usize) -> Result<GradedDims> {
    Ok(alg.component(grading, t, true)?.complex.homology_dims().truncated(t))
}

/// Homotopy of the total weight-`d` part of a cell algebra, degrees `0..t`.
/// With `symmetric`, gradings that agree up to permutation are computed once;
/// this is valid when all cells are interchangeable, as for spheres.
pub fn weight_homotopy<F: Field>(alg: &CellAlgebra<F>, d: u32, t: usize, symmetric: bool) -> Result<GradedDims> {
    let mut total = GradedDims::zeros(t);
    let mut memo: FxHashMap<Vec<u32>, GradedDims> = FxHashMap::default();
    for g in gradings_of_weight(alg.grading_rank(), d) {
        let key = if symmetric {
            let mut k = g.clone();
            k.sort_unstable_by(|a, b| b.cmp(a));
            k
        } else {
            g.clone()
        };
        if !memo.contains_key(&key) {
            let h = component_homotopy(alg, &key, t)?;
            memo.insert(key.clone(), h);
        }
        total = total.add(&memo[&key]);
    }
    Ok(total)
}

/// `π_* S(V, n)` for `dim V = q` over `field`, using levels `0..=t`
/// (degrees `0..t` certified) and weights `0..=w`.
pub fn sphere_homotopy<F: Field>(field: &F, q: usize, n: usize, t: usize, w: usize) -> Result<HomotopyReport> {
    if n == 0 {
        return Err(Error::Bounds("sphere degree must be at least 1".into()));
    }
    if t < n || t == 0 {
        return Err(Error::Bounds(format!("truncation {t} must be at least the sphere degree {n}")));
    }
    if t > surjection::MAX_LEVEL {
        return Err(Error::Bounds(format!("truncation {t} exceeds {}", surjection::MAX_LEVEL)));
    }
    if w == 0 {
        return Err(Error::Bounds("weight bound must be at least 1".into()));
    }
    let alg = sphere_cells(field, q, n)?;
    let by_weight = (0..=w as u32).map(|d| weight_homotopy(&alg, d, t, true)).collect::<Result<Vec<_>>>()?;
    let next_weight = weight_homotopy(&alg, w as u32 + 1, t, true)?;
    let dims = by_weight.iter().fold(GradedDims::zeros(t), |acc, g| acc.add(g));
    let mut stable_flags = Vec::with_capacity(t);
    let mut clean = true;
    for k in 0..t {
        clean &= next_weight.get(k) == 0;
        stable_flags.push(clean);
    }
    Ok(HomotopyReport {
        field: field.spec(),
        q,
        n,
        truncation: t,
        weight_bound: w,
        dims,
        by_weight,
        next_weight,
        certified_degree: t - 1,
        stable_flags,
    })
}

/// The Hurewicz map in degree `s` of a cell algebra, over weights `1..=w`,
/// from the normalized complexes through level `s + 1`. Source and target
/// bases are grouped by grading in the order of [`gradings_of_weight`].
pub fn hurewicz<F: Field>(alg: &CellAlgebra<F>, s: usize, w: u32) -> Result<HurewiczMap<F>> {
    let field = alg.field();
    let top = s + 1;
    let mut rows_total = 0;
    let mut cols: Vec<SparseVec<F::Elem>> = Vec::new();
    for d in 1..=w {
        for g in gradings_of_weight(alg.grading_rank(), d) {
            let comp = alg.component(&g, top, true)?;
            let c = &comp.complex;
            let hb = HomologyBasis::new(c.boundary(s + 1), c.boundary(s))?;
            let (by_dim, lin) = alg.linear_complex(Some(&g), top)?;
            let qb = HomologyBasis::new(lin.boundary(s + 1), lin.boundary(s))?;
            let pos: FxHashMap<usize, usize> = by_dim[s].iter().enumerate().map(|(i, &cell)| (cell, i)).collect();
            for z in hb.representatives() {
                let mut proj = Vec::new();
                for (idx, x) in &z {
                    let mono = &comp.bases[s][*idx];
                    if mono.len() == 1 && mask_of(mono[0]) == surjection::full(s) {
                        if let Some(&p) = pos.get(&cell_of(mono[0])) {
                            proj.push((p, x.clone()));
                        }
                    }
                }
                proj.sort_by_key(|e| e.0);
                let coords = qb.coordinates(&proj).ok_or_else(|| {
                    Error::Mismatch("projection of a cycle is not a cycle of the indecomposables".into())
                })?;
                cols.push(
                    coords
                        .into_iter()
                        .enumerate()
                        .filter(|(_, x)| !field.is_zero(x))
                        .map(|(i, x)| (rows_total + i, x))
                        .collect(),
                );
            }
            rows_total += qb.dim();
        }
    }
    Ok(HurewiczMap::new(s, Matrix::from_columns(field, rows_total, cols)?))
}
