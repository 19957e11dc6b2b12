//! Almost-free simplicial commutative algebras presented by cells.
//!
//! Level `m` is the polynomial algebra on generators `(c, σ)` for each cell
//! `c` of dimension `k` and each surjection `σ: [m] ↠ [k]`. Degeneracies
//! send generators to generators, so the algebra is almost free. The face
//! `d_k` of the top generator of a cell is its attaching polynomial, which
//! must have all faces zero; every other face follows from the surjection
//! calculus. Each cell carries a nonzero grading vector and its attaching
//! polynomial must be homogeneous of that grading, so the algebra splits
//! into finite graded components.

use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{normalize, Matrix, SparseVec};
use crate::simplicial::{dold_kan_inverse, ChainComplex, SimplicialVectorSpace};
use crate::surjection::{self, Face};

/// A generator `(cell, mask)` packed as `cell << 48 | mask`.
pub type Gen = u64;

const CELL_SHIFT: u32 = 48;

pub fn pack(cell: usize, mask: u64) -> Gen {
    ((cell as u64) << CELL_SHIFT) | mask
}

pub fn cell_of(g: Gen) -> usize {
    (g >> CELL_SHIFT) as usize
}

pub fn mask_of(g: Gen) -> u64 {
    g & ((1u64 << CELL_SHIFT) - 1)
}

/// Sorted list of generators, with repetition.
pub type Monomial = SmallVec<[Gen; 6]>;

/// Polynomial as sorted `(monomial, coefficient)` terms without zeros.
pub type Poly<E> = Vec<(Monomial, E)>;

/// Sorts and merges polynomial terms.
pub fn normalize_poly<F: Field>(field: &F, terms: Vec<(Monomial, F::Elem)>) -> Poly<F::Elem> {
    let mut acc: FxHashMap<Monomial, F::Elem> = FxHashMap::default();
    for (m, x) in terms {
        match acc.get_mut(&m) {
            Some(y) => *y = field.add(y, &x),
            None => {
                acc.insert(m, x);
            }
        }
    }
    let mut out: Poly<F::Elem> = acc.into_iter().filter(|(_, x)| !field.is_zero(x)).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn merge(a: &[Gen], b: &[Gen]) -> Monomial {
    let mut out = Monomial::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] <= b[j]) {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out
}

/// Whether a monomial at level `m` is outside the image of every degeneracy.
pub fn is_nondegenerate(mono: &[Gen], m: usize) -> bool {
    mono.iter().fold(0u64, |acc, &g| acc | mask_of(g)) == surjection::full(m)
}

#[derive(Clone, Debug)]
pub struct Cell<E> {
    pub dim: usize,
    pub grading: Vec<u32>,
    /// Attaching polynomial at level `dim - 1`.
    pub attach: Poly<E>,
}

#[derive(Clone, Debug)]
pub struct CellAlgebra<F: Field> {
    field: F,
    grading_rank: usize,
    cells: Vec<Cell<F::Elem>>,
}

enum GenImage<E> {
    Zero,
    Gen(Gen),
    Poly(Arc<Poly<E>>),
}

/// Memoized pullbacks of attaching polynomials; one per worker.
pub struct FaceCache<E> {
    pullbacks: FxHashMap<(usize, u64, usize), Arc<Poly<E>>>,
}

impl<E> FaceCache<E> {
    pub fn new() -> Self {
        FaceCache { pullbacks: FxHashMap::default() }
    }
}

impl<E> Default for FaceCache<E> {
    fn default() -> Self {
        Self::new()
    }
}

/// Bases and normalized (or Moore) chain complex of one graded component.
pub struct Component<F: Field> {
    pub grading: Vec<u32>,
    pub bases: Vec<Vec<Monomial>>,
    pub complex: ChainComplex<F>,
}

impl<F: Field> CellAlgebra<F> {
    /// The algebra with no cells (the ground field).
    pub fn new(field: &F, grading_rank: usize) -> Self {
        CellAlgebra { field: field.clone(), grading_rank, cells: Vec::new() }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn grading_rank(&self) -> usize {
        self.grading_rank
    }

    pub fn cells(&self) -> &[Cell<F::Elem>] {
        &self.cells
    }

    /// Attaches a cell; returns its index. The attaching polynomial must
    /// use earlier cells, be homogeneous of the cell's grading, and have all
    /// faces zero.
    pub fn add_cell(&mut self, dim: usize, grading: Vec<u32>, attach: Poly<F::Elem>) -> Result<usize> {
        if dim == 0 || dim > surjection::MAX_LEVEL {
            return Err(Error::Unsupported(format!("cell dimension {dim} outside 1..={}", surjection::MAX_LEVEL)));
        }
        if grading.len() != self.grading_rank || grading.iter().all(|&x| x == 0) {
            return Err(Error::Unsupported("cell grading must be a nonzero vector of the algebra's rank".into()));
        }
        let attach = normalize_poly(&self.field, attach);
        for (mono, x) in &attach {
            if !self.field.contains(x) {
                return Err(Error::Unsupported("attaching coefficient outside the field".into()));
            }
            let mut total = vec![0u32; self.grading_rank];
            for &g in mono {
                let c = cell_of(g);
                let cell = self.cells.get(c).ok_or_else(|| {
                    Error::Unsupported(format!("attaching polynomial uses unknown cell {c}"))
                })?;
                let mask = mask_of(g);
                if mask >> (dim - 1) != 0 || mask.count_ones() as usize != cell.dim {
                    return Err(Error::Unsupported(format!("generator mask {mask:b} invalid at level {}", dim - 1)));
                }
                for (t, w) in total.iter_mut().zip(&cell.grading) {
                    *t += w;
                }
            }
            if total != grading {
                return Err(Error::Unsupported("attaching polynomial is not homogeneous of the cell grading".into()));
            }
        }
        if dim >= 2 {
            let mut cache = FaceCache::new();
            for i in 0..dim {
                if !self.poly_face(&attach, dim - 1, i, &mut cache).is_empty() {
                    return Err(Error::NotACycle(format!("attaching polynomial has nonzero face d_{i}")));
                }
            }
        }
        self.cells.push(Cell { dim, grading, attach });
        Ok(self.cells.len() - 1)
    }

    /// `τ^*` applied to the attaching polynomial of `cell`, where `τ` has
    /// mask `tau` at level `level`.
    fn pullback(&self, cell: usize, tau: u64, level: usize, cache: &mut FaceCache<F::Elem>) -> Arc<Poly<F::Elem>> {
        if let Some(p) = cache.pullbacks.get(&(cell, tau, level)) {
            return p.clone();
        }
        let p: Poly<F::Elem> = self.cells[cell]
            .attach
            .iter()
            .map(|(mono, x)| {
                let mut out: Monomial =
                    mono.iter().map(|&g| pack(cell_of(g), surjection::compose(mask_of(g), tau))).collect();
                out.sort_unstable();
                (out, x.clone())
            })
            .collect();
        let p = Arc::new(normalize_poly(&self.field, p));
        cache.pullbacks.insert((cell, tau, level), p.clone());
        p
    }

    fn gen_face(&self, g: Gen, m: usize, i: usize, cache: &mut FaceCache<F::Elem>) -> GenImage<F::Elem> {
        let c = cell_of(g);
        match surjection::face(mask_of(g), m, i) {
            Face::Surjective(nm) => GenImage::Gen(pack(c, nm)),
            Face::Boundary(tau) => {
                let p = self.pullback(c, tau, m - 1, cache);
                if p.is_empty() {
                    GenImage::Zero
                } else {
                    GenImage::Poly(p)
                }
            }
            Face::Zero => GenImage::Zero,
        }
    }

    /// `d_i` of a monomial at level `m`.
    pub(crate) fn monomial_face(
        &self,
        mono: &[Gen],
        m: usize,
        i: usize,
        cache: &mut FaceCache<F::Elem>,
    ) -> Vec<(Monomial, F::Elem)> {
        let mut plain = Monomial::new();
        let mut polys = Vec::new();
        for &g in mono {
            match self.gen_face(g, m, i, cache) {
                GenImage::Zero => return Vec::new(),
                GenImage::Gen(h) => plain.push(h),
                GenImage::Poly(p) => polys.push(p),
            }
        }
        plain.sort_unstable();
        let mut acc: Vec<(Monomial, F::Elem)> = vec![(plain, self.field.one())];
        for p in polys {
            let mut next = Vec::with_capacity(acc.len() * p.len());
            for (a, x) in &acc {
                for (b, y) in p.iter() {
                    next.push((merge(a, b), self.field.mul(x, y)));
                }
            }
            acc = next;
        }
        acc
    }

    /// `d_i` of a polynomial at level `m`.
    pub fn poly_face(&self, p: &[(Monomial, F::Elem)], m: usize, i: usize, cache: &mut FaceCache<F::Elem>) -> Poly<F::Elem> {
        let mut terms = Vec::new();
        for (mono, x) in p {
            for (out, y) in self.monomial_face(mono, m, i, cache) {
                terms.push((out, self.field.mul(x, &y)));
            }
        }
        normalize_poly(&self.field, terms)
    }

    /// `s_j` of a polynomial at level `m`.
    pub fn poly_degeneracy(&self, p: &[(Monomial, F::Elem)], j: usize) -> Poly<F::Elem> {
        p.iter()
            .map(|(mono, x)| {
                let out: Monomial =
                    mono.iter().map(|&g| pack(cell_of(g), surjection::degeneracy(mask_of(g), j))).collect();
                (out, x.clone())
            })
            .collect()
    }

    /// Monomials of grading `grading` at level `m`, in lexicographic order.
    /// With `nondegenerate_only` the degenerate ones are skipped.
    pub fn component_basis(&self, grading: &[u32], m: usize, nondegenerate_only: bool) -> Vec<Monomial> {
        let blocks: Vec<(usize, Vec<u64>)> = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.dim <= m)
            .map(|(i, c)| (i, surjection::masks(m, c.dim)))
            .collect();
        let min_norm = self.cells.iter().map(|c| c.grading.iter().sum::<u32>()).min().unwrap_or(1).max(1);
        let max_dim = blocks.iter().map(|(c, _)| self.cells[*c].dim).max().unwrap_or(0);
        let mut search = BasisSearch {
            alg: self,
            blocks: &blocks,
            full: surjection::full(m),
            nondegenerate_only,
            min_norm,
            max_dim,
            out: Vec::new(),
        };
        let mut current = Monomial::new();
        search.run(0, 0, grading.to_vec(), 0, &mut current);
        search.out
    }

    /// Chain complex of the graded component through level `top`: the
    /// normalized complex on nondegenerate monomials, or the Moore complex
    /// on all monomials.
    pub fn component(&self, grading: &[u32], top: usize, normalized: bool) -> Result<Component<F>> {
        if top > surjection::MAX_LEVEL {
            return Err(Error::Bounds(format!("level {top} exceeds {}", surjection::MAX_LEVEL)));
        }
        if grading.len() != self.grading_rank {
            return Err(Error::Dimension("grading vector has the wrong length".into()));
        }
        let bases: Vec<Vec<Monomial>> = (0..=top).map(|m| self.component_basis(grading, m, normalized)).collect();
        let mut boundaries = Vec::with_capacity(top);
        for m in 1..=top {
            boundaries.push(self.boundary_matrix(&bases[m], &bases[m - 1], m, normalized)?);
        }
        let dims = bases.iter().map(Vec::len).collect();
        let complex = ChainComplex::new(&self.field, dims, boundaries)
            .map_err(|e| Error::Mismatch(format!("cell algebra differential: {e}")))?;
        Ok(Component { grading: grading.to_vec(), bases, complex })
    }

    fn boundary_matrix(&self, source: &[Monomial], target: &[Monomial], m: usize, normalized: bool) -> Result<Matrix<F>> {
        let index: FxHashMap<&Monomial, usize> = target.iter().enumerate().map(|(i, mono)| (mono, i)).collect();
        let cols: Vec<Result<SparseVec<F::Elem>>> = source
            .par_iter()
            .map_init(FaceCache::new, |cache, mono| {
                let mut terms = Vec::new();
                for i in 0..=m {
                    let sign = self.field.sign(i);
                    for (out, x) in self.monomial_face(mono, m, i, cache) {
                        if normalized && !is_nondegenerate(&out, m - 1) {
                            continue;
                        }
                        let r = *index.get(&out).ok_or_else(|| {
                            Error::Mismatch(format!("face of {mono:?} leaves the graded component"))
                        })?;
                        terms.push((r, self.field.mul(&sign, &x)));
                    }
                }
                Ok(normalize(&self.field, terms))
            })
            .collect();
        let cols = cols.into_iter().collect::<Result<Vec<_>>>()?;
        Matrix::from_columns(&self.field, target.len(), cols)
    }

    /// Cellular chains of the indecomposables: degree `k` spanned by the
    /// cells of dimension `k` (optionally only those of one grading), with
    /// differential the linear part of the attaching maps.
    pub fn linear_complex(&self, grading: Option<&[u32]>, top: usize) -> Result<(Vec<Vec<usize>>, ChainComplex<F>)> {
        let selected = |c: &Cell<F::Elem>| grading.is_none_or(|g| c.grading == g);
        let by_dim: Vec<Vec<usize>> = (0..=top)
            .map(|k| (0..self.cells.len()).filter(|&c| self.cells[c].dim == k && selected(&self.cells[c])).collect())
            .collect();
        let mut boundaries = Vec::with_capacity(top);
        for k in 1..=top {
            let pos: FxHashMap<usize, usize> = by_dim[k - 1].iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let mut cols = Vec::with_capacity(by_dim[k].len());
            for &c in &by_dim[k] {
                let mut col = Vec::new();
                for (mono, x) in &self.cells[c].attach {
                    if mono.len() != 1 {
                        continue;
                    }
                    let g = mono[0];
                    let r = match pos.get(&cell_of(g)) {
                        Some(&r) if mask_of(g) == surjection::full(k - 1) => r,
                        _ => {
                            return Err(Error::Mismatch(format!(
                                "linear part of cell {c} is not a combination of top generators"
                            )))
                        }
                    };
                    col.push((r, x.clone()));
                }
                cols.push(normalize(&self.field, col));
            }
            boundaries.push(Matrix::from_columns(&self.field, by_dim[k - 1].len(), cols)?);
        }
        let dims = by_dim.iter().map(Vec::len).collect();
        Ok((by_dim, ChainComplex::new(&self.field, dims, boundaries)?))
    }

    /// The indecomposables `QA = IA / (IA)^2` through level `t`, as the
    /// Dold–Kan object of the linear cellular complex.
    pub fn indecomposables(&self, t: usize) -> Result<SimplicialVectorSpace<F>> {
        let (_, lin) = self.linear_complex(None, t)?;
        dold_kan_inverse(&lin, t)
    }
}

struct BasisSearch<'a, F: Field> {
    alg: &'a CellAlgebra<F>,
    blocks: &'a [(usize, Vec<u64>)],
    full: u64,
    nondegenerate_only: bool,
    min_norm: u32,
    max_dim: usize,
    out: Vec<Monomial>,
}

impl<F: Field> BasisSearch<'_, F> {
    fn run(&mut self, block: usize, start: usize, remaining: Vec<u32>, covered: u64, current: &mut Monomial) {
        let left: u32 = remaining.iter().sum();
        if left == 0 {
            if !self.nondegenerate_only || covered == self.full {
                self.out.push(current.clone());
            }
            return;
        }
        if self.nondegenerate_only {
            let uncovered = (self.full & !covered).count_ones() as usize;
            if uncovered > (left / self.min_norm) as usize * self.max_dim {
                return;
            }
        }
        for b in block..self.blocks.len() {
            let (cell, masks) = &self.blocks[b];
            let grading = &self.alg.cells[*cell].grading;
            if grading.iter().zip(&remaining).any(|(g, r)| g > r) {
                continue;
            }
            let next: Vec<u32> = remaining.iter().zip(grading).map(|(r, g)| r - g).collect();
            let first = if b == block { start } else { 0 };
            for (k, &mask) in masks.iter().enumerate().skip(first) {
                current.push(pack(*cell, mask));
                self.run(b, k, next.clone(), covered | mask, current);
                current.pop();
            }
        }
    }
}

/// The sphere algebra on `q` cells of dimension `n`, one grading coordinate per cell.
pub fn sphere_cells<F: Field>(field: &F, q: usize, n: usize) -> Result<CellAlgebra<F>> {
    let mut alg = CellAlgebra::new(field, q);
    for v in 0..q {
        let mut g = vec![0; q];
        g[v] = 1;
        alg.add_cell(n, g, Vec::new())?;
    }
    Ok(alg)
}

/// `S(ℓ, n)` with an acyclic pair of cells `a` (dimension `k`) and `b`
/// (dimension `k + 1`, attached to `a` linearly) adjoined, all of weight one.
/// Its generating object is `K(ℓ, n)` plus a contractible summand.
pub fn sphere_with_acyclic_cells<F: Field>(field: &F, n: usize, k: usize) -> Result<CellAlgebra<F>> {
    let mut alg = CellAlgebra::new(field, 1);
    alg.add_cell(n, vec![1], Vec::new())?;
    let a = alg.add_cell(k, vec![1], Vec::new())?;
    let mut mono = Monomial::new();
    mono.push(pack(a, surjection::full(k)));
    alg.add_cell(k + 1, vec![1], vec![(mono, field.one())])?;
    Ok(alg)
}

/// Grading vectors of total weight `d` in `rank` coordinates, lexicographically decreasing.
pub fn gradings_of_weight(rank: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(rank: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == rank {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for x in (0..=d).rev() {
            prefix.push(x);
            rec(rank, d - x, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if rank == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(rank, d, &mut Vec::new(), &mut out);
    out
}
