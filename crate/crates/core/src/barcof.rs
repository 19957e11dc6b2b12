//! Maps out of spheres, the two-sided bar construction, homotopy cofibers,
//! and the rational `A⟨r,s⟩` family.
//!
//! A map `S(ℓ, n) → B` is determined by a vector `z` at level `n` of `B`
//! with all faces zero; the generator indexed by `σ: [m] ↠ [n]` goes to
//! `σ^* z`. The cofiber `ℓ ⊗^h_A B` is computed as the diagonal of the bar
//! object `[p] ↦ A^{⊗p} ⊗ B`, split by total weight. An independent model
//! attaches a cell to `B` along `z`.

use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{Field, Rationals};
use crate::matrix::{solve, HomologyBasis, Matrix, SparseVec};
use crate::series::TruncatedSeries;
use crate::simplicial::{
    eilenberg_maclane, homotopy_dims, normalized_chains, normalized_projection, GradedDims, SimplicialVectorSpace,
};
use crate::surjection;
use crate::symalg::cells::{pack, CellAlgebra, Monomial};
use crate::symalg::homotopy::weight_homotopy;
use crate::symalg::sympow::{expand_product, multisets, IdxMono, WeightGradedAlgebra};

/// An algebra map `S(ℓ, n) → B`, `B = Sym(V)` through some weight, sending
/// the generator into the weight-`k` component.
#[derive(Clone, Debug)]
pub struct AlgebraMap<F: Field> {
    field: F,
    degree: usize,
    weight: usize,
    target: Arc<WeightGradedAlgebra<F>>,
    source_base: SimplicialVectorSpace<F>,
    cycle: SparseVec<F::Elem>,
    generator_images: Vec<Matrix<F>>,
}

impl<F: Field> AlgebraMap<F> {
    /// The map sending the generator to `z`, which must have all faces zero.
    pub fn from_moore_cycle(
        target: &Arc<WeightGradedAlgebra<F>>,
        degree: usize,
        weight: usize,
        z: SparseVec<F::Elem>,
    ) -> Result<Self> {
        let field = target.field().clone();
        let t = target.truncation();
        if degree == 0 || degree > t {
            return Err(Error::Bounds(format!("sphere degree {degree} must lie in 1..={t}")));
        }
        if weight == 0 || weight > target.weight_bound() {
            return Err(Error::Bounds(format!("weight {weight} outside 1..={}", target.weight_bound())));
        }
        let comp = target.component(weight);
        for i in 0..=degree {
            if !comp.face(degree, i).apply(&z).is_empty() {
                return Err(Error::NotACycle(format!("d_{i} of the image is nonzero")));
            }
        }
        let source_base = eilenberg_maclane(&field, 1, degree, t)?;
        let mut generator_images = Vec::with_capacity(t + 1);
        for m in 0..=t {
            let cols = surjection::masks(m, degree)
                .into_iter()
                .map(|mask| comp.apply_surjection(mask, m, degree, &z))
                .collect::<Result<Vec<_>>>()?;
            generator_images.push(Matrix::from_columns(&field, comp.level_dim(m), cols)?);
        }
        Ok(AlgebraMap { field, degree, weight, target: target.clone(), source_base, cycle: z, generator_images })
    }

    /// The map factoring through the augmentation.
    pub fn zero(target: &Arc<WeightGradedAlgebra<F>>, degree: usize, weight: usize) -> Result<Self> {
        Self::from_moore_cycle(target, degree, weight, Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn target(&self) -> &WeightGradedAlgebra<F> {
        &self.target
    }

    /// The image of the top generator.
    pub fn cycle(&self) -> &[(usize, F::Elem)] {
        &self.cycle
    }

    /// Images of the level-`m` generators, `K(ℓ, n)_m → Sym^k(V)_m`.
    pub fn generator_images(&self, m: usize) -> &Matrix<F> {
        &self.generator_images[m]
    }

    /// Checks that the generator images commute with faces and degeneracies.
    pub fn check(&self) -> Result<()> {
        let comp = self.target.component(self.weight);
        let t = self.target.truncation();
        for m in 1..=t {
            for i in 0..=m {
                let lhs = comp.face(m, i).mul(&self.generator_images[m])?;
                let rhs = self.generator_images[m - 1].mul(self.source_base.face(m, i))?;
                if lhs != rhs {
                    return Err(Error::Mismatch(format!("generator images do not commute with d_{i} on level {m}")));
                }
            }
        }
        for m in 0..t {
            for j in 0..=m {
                let lhs = comp.degeneracy(m, j).mul(&self.generator_images[m])?;
                let rhs = self.generator_images[m + 1].mul(self.source_base.degeneracy(m, j))?;
                if lhs != rhs {
                    return Err(Error::Mismatch(format!("generator images do not commute with s_{j} on level {m}")));
                }
            }
        }
        Ok(())
    }

    /// Class of the image of the fundamental class in `π_n` of the weight-`k`
    /// component, in the homology basis chosen by [`HomologyBasis`].
    pub fn induced_class(&self) -> Result<Vec<F::Elem>> {
        class_coordinates(self.target.component(self.weight), self.degree, self.cycle.clone())
    }

    /// Expands `f` on a monomial of `A_m` into a polynomial of `B_m`.
    fn apply_monomial(&self, mono: &IdxMono, m: usize) -> Vec<(IdxMono, F::Elem)> {
        let images = &self.generator_images[m];
        let basis = self.target.basis(self.weight, m);
        let mut acc: Vec<(IdxMono, F::Elem)> = vec![(IdxMono::new(), self.field.one())];
        for &g in mono {
            let mut next = Vec::new();
            for (b, x) in &acc {
                for (r, y) in images.column(g as usize) {
                    let mut merged: IdxMono = b.iter().chain(basis[*r].iter()).copied().collect();
                    merged.sort_unstable();
                    next.push((merged, self.field.mul(x, y)));
                }
            }
            acc = next;
        }
        acc
    }
}

fn class_coordinates<F: Field>(comp: &SimplicialVectorSpace<F>, n: usize, x: SparseVec<F::Elem>) -> Result<Vec<F::Elem>> {
    if n + 1 > comp.truncation() {
        return Err(Error::Truncation(format!("classes in degree {n} need level {}", n + 1)));
    }
    let nc = normalized_chains(comp)?;
    let hb = HomologyBasis::new(nc.boundary(n + 1), nc.boundary(n))?;
    let c = normalized_projection(comp, n, x);
    hb.coordinates(&c).ok_or_else(|| Error::NotACycle(format!("vector is not a cycle of N_{n}")))
}

/// The map `S(ℓ, n) → B` representing the class of `cycle`, a level-`n`
/// vector of the weight-`k` component whose image in `N_n` is a cycle. The
/// generator goes to a vector with all faces zero in the same class; the
/// induced class is recomputed and compared.
pub fn representing_map<F: Field>(
    target: &Arc<WeightGradedAlgebra<F>>,
    n: usize,
    weight: usize,
    cycle: SparseVec<F::Elem>,
) -> Result<AlgebraMap<F>> {
    if weight == 0 || weight > target.weight_bound() {
        return Err(Error::Bounds(format!("weight {weight} outside 1..={}", target.weight_bound())));
    }
    let field = target.field().clone();
    let comp = target.component(weight);
    let wanted = class_coordinates(comp, n, cycle)?;
    let z = if wanted.iter().all(|x| field.is_zero(x)) {
        Vec::new()
    } else {
        let moore = comp.moore_cycles(n)?;
        let coords = moore
            .columns()
            .iter()
            .map(|k| class_coordinates(comp, n, k.clone()))
            .collect::<Result<Vec<_>>>()?;
        let sparse = |v: Vec<F::Elem>| -> SparseVec<F::Elem> {
            v.into_iter().enumerate().filter(|(_, x)| !field.is_zero(x)).collect()
        };
        let a = Matrix::from_columns(&field, wanted.len(), coords.into_iter().map(sparse).collect())?;
        let lambda = solve(&a, &sparse(wanted.clone()))
            .ok_or_else(|| Error::Mismatch("class has no representative with all faces zero".into()))?;
        let mut z = Vec::new();
        for (i, x) in lambda {
            z = crate::matrix::axpy(&field, &z, &field.neg(&x), moore.column(i));
        }
        z
    };
    let f = AlgebraMap::from_moore_cycle(target, n, weight, z)?;
    if f.induced_class()? != wanted {
        return Err(Error::Mismatch("representing map induces a different class".into()));
    }
    Ok(f)
}

/// Key of a bar basis element: one `A`-monomial per slot, then a `B`-monomial.
type BarKey = (Vec<IdxMono>, IdxMono);

struct BarLevel {
    basis: Vec<BarKey>,
    index: FxHashMap<BarKey, usize>,
}

/// Compositions of `total` into `slots` parts with at most `max_nonzero` nonzero parts.
fn bounded_compositions(total: usize, slots: usize, max_nonzero: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, slots: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == slots {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in 0..=total {
            if x > 0 && budget == 0 {
                break;
            }
            cur.push(x);
            rec(total - x, slots, budget - usize::from(x > 0), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, slots, max_nonzero, &mut Vec::new(), &mut out);
    out
}

/// Weight-`w` part of the bar diagonal at level `m`: `A_m^{⊗m} ⊗ B_m` with
/// at most `n_bound` nonunit `A` factors.
fn bar_level<F: Field>(f: &AlgebraMap<F>, w: usize, m: usize, n_bound: usize) -> BarLevel {
    let k = f.weight;
    let a_dim = f.source_base.level_dim(m);
    let b_dim = f.target.base().level_dim(m);
    let mut basis = Vec::new();
    for a_total in 0..=w / k {
        let b_weight = w - a_total * k;
        let b_monos = multisets(b_dim, b_weight);
        if b_monos.is_empty() {
            continue;
        }
        for parts in bounded_compositions(a_total, m, n_bound) {
            let slot_choices: Vec<Vec<IdxMono>> = parts.iter().map(|&d| multisets(a_dim, d)).collect();
            if slot_choices.iter().any(Vec::is_empty) {
                continue;
            }
            let mut cursor = vec![0usize; m];
            loop {
                let slots: Vec<IdxMono> = (0..m).map(|i| slot_choices[i][cursor[i]].clone()).collect();
                for b in &b_monos {
                    basis.push((slots.clone(), b.clone()));
                }
                let mut i = m;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    cursor[i] += 1;
                    if cursor[i] < slot_choices[i].len() {
                        break;
                    }
                    cursor[i] = 0;
                    if i == 0 {
                        i = usize::MAX;
                        break;
                    }
                }
                if i == usize::MAX || m == 0 {
                    break;
                }
            }
        }
    }
    let index = basis.iter().enumerate().map(|(i, key)| (key.clone(), i)).collect();
    BarLevel { basis, index }
}

/// Tensor expansion of per-slot polynomials.
fn expand_slots<E: Clone, F: Field<Elem = E>>(
    field: &F,
    slots: &[Vec<(IdxMono, E)>],
    b: &[(IdxMono, E)],
) -> Vec<(BarKey, E)> {
    let mut acc: Vec<(Vec<IdxMono>, E)> = vec![(Vec::with_capacity(slots.len()), field.one())];
    for poly in slots {
        let mut next = Vec::with_capacity(acc.len() * poly.len());
        for (prefix, x) in &acc {
            for (mono, y) in poly {
                let mut p = prefix.clone();
                p.push(mono.clone());
                next.push((p, field.mul(x, y)));
            }
        }
        acc = next;
    }
    let mut out = Vec::with_capacity(acc.len() * b.len());
    for (slots, x) in acc {
        for (bm, y) in b {
            out.push(((slots.clone(), bm.clone()), field.mul(&x, y)));
        }
    }
    out
}

fn product_poly<F: Field>(field: &F, p: &[(IdxMono, F::Elem)], q: &[(IdxMono, F::Elem)]) -> Vec<(IdxMono, F::Elem)> {
    let mut out = Vec::with_capacity(p.len() * q.len());
    for (a, x) in p {
        for (b, y) in q {
            let mut z: IdxMono = a.iter().chain(b.iter()).copied().collect();
            z.sort_unstable();
            out.push((z, field.mul(x, y)));
        }
    }
    out
}

fn map_poly<F: Field>(field: &F, map: &Matrix<F>, mono: &IdxMono) -> Vec<(IdxMono, F::Elem)> {
    let factors: Vec<&[(usize, F::Elem)]> = mono.iter().map(|&a| map.column(a as usize)).collect();
    expand_product(field, &factors)
}

fn normalize_keys<F: Field>(field: &F, index: &FxHashMap<BarKey, usize>, terms: Vec<(BarKey, F::Elem)>) -> Result<SparseVec<F::Elem>> {
    let mut out = Vec::with_capacity(terms.len());
    for (key, x) in terms {
        let i = *index
            .get(&key)
            .ok_or_else(|| Error::Mismatch("bar structure map leaves the truncated basis".into()))?;
        out.push((i, x));
    }
    Ok(crate::matrix::normalize(field, out))
}

/// The weight-`w` components (`w = 0..=W`) of the diagonal of the bar
/// object of `f`, through the target's truncation, keeping at most
/// `n_bound` nonunit `A` factors.
pub fn bar_diagonal<F: Field>(f: &AlgebraMap<F>, n_bound: usize, w_bound: usize) -> Result<Vec<SimplicialVectorSpace<F>>> {
    (0..=w_bound).map(|w| bar_component(f, n_bound, w)).collect()
}

/// One weight component of [`bar_diagonal`].
pub fn bar_component<F: Field>(f: &AlgebraMap<F>, n_bound: usize, w: usize) -> Result<SimplicialVectorSpace<F>> {
    let field = &f.field;
    let t = f.target.truncation();
    let a = &f.source_base;
    let v = f.target.base();
    let levels: Vec<BarLevel> = (0..=t).map(|m| bar_level(f, w, m, n_bound)).collect();
    let mut faces = Vec::with_capacity(t);
    for m in 1..=t {
        let mut list = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let mut cols = Vec::with_capacity(levels[m].basis.len());
            for (slots, b) in &levels[m].basis {
                let vslots: Vec<Vec<(IdxMono, F::Elem)>> = slots.iter().map(|s| map_poly(field, a.face(m, i), s)).collect();
                let vb = map_poly(field, v.face(m, i), b);
                let terms = if i == 0 {
                    if !slots[0].is_empty() {
                        Vec::new()
                    } else {
                        expand_slots(field, &vslots[1..], &vb)
                    }
                } else if i < m {
                    let mut merged = Vec::with_capacity(m - 1);
                    merged.extend_from_slice(&vslots[..i - 1]);
                    merged.push(product_poly(field, &vslots[i - 1], &vslots[i]));
                    merged.extend_from_slice(&vslots[i + 1..]);
                    expand_slots(field, &merged, &vb)
                } else {
                    let mut last = Vec::new();
                    for (mono, x) in &vslots[m - 1] {
                        for (img, y) in f.apply_monomial(mono, m - 1) {
                            last.push((img, field.mul(x, &y)));
                        }
                    }
                    let nb = product_poly(field, &last, &vb);
                    expand_slots(field, &vslots[..m - 1], &nb)
                };
                cols.push(normalize_keys(field, &levels[m - 1].index, terms)?);
            }
            list.push(Matrix::from_columns(field, levels[m - 1].basis.len(), cols)?);
        }
        faces.push(list);
    }
    let mut degeneracies = Vec::with_capacity(t);
    for m in 0..t {
        let mut list = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let mut cols = Vec::with_capacity(levels[m].basis.len());
            for (slots, b) in &levels[m].basis {
                let mut vslots: Vec<Vec<(IdxMono, F::Elem)>> =
                    slots.iter().map(|s| map_poly(field, a.degeneracy(m, j), s)).collect();
                vslots.insert(j, vec![(IdxMono::new(), field.one())]);
                let vb = map_poly(field, v.degeneracy(m, j), b);
                cols.push(normalize_keys(field, &levels[m + 1].index, expand_slots(field, &vslots, &vb))?);
            }
            list.push(Matrix::from_columns(field, levels[m + 1].basis.len(), cols)?);
        }
        degeneracies.push(list);
    }
    let dims = levels.iter().map(|l| l.basis.len()).collect();
    SimplicialVectorSpace::from_parts(field, dims, faces, degeneracies)
}

/// Cofiber homotopy from the bar diagonal, with weight and bar-length certification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CofiberHomotopy {
    pub dims: GradedDims,
    pub by_weight: Vec<GradedDims>,
    pub certified_degree: usize,
    /// Entry `k` is true when raising `W` and `N` by one changes nothing in degrees `≤ k`.
    pub flags: Vec<bool>,
    pub weight_bound: usize,
    pub bar_bound: usize,
}

impl CofiberHomotopy {
    pub fn stable_degree(&self) -> Option<usize> {
        self.flags.iter().rposition(|&f| f)
    }
}

/// Homotopy of the cofiber of `f` through weight `W` and bar length `N`.
/// When `N` already admits every nonunit factor allowed by weight `W + 1`
/// the bar-length recomputation is identical by construction and is skipped.
pub fn cofiber_homotopy<F: Field>(f: &AlgebraMap<F>, n_bound: usize, w_bound: usize) -> Result<CofiberHomotopy> {
    let t = f.target.truncation();
    let comp = |n: usize, w: usize| -> Result<GradedDims> { homotopy_dims(&bar_component(f, n, w)?) };
    let by_weight = (0..=w_bound).map(|w| comp(n_bound, w)).collect::<Result<Vec<_>>>()?;
    let next = comp(n_bound, w_bound + 1)?;
    let longer = if n_bound >= (w_bound + 1) / f.weight {
        None
    } else {
        Some((0..=w_bound).map(|w| comp(n_bound + 1, w)).collect::<Result<Vec<_>>>()?)
    };
    let dims = by_weight.iter().fold(GradedDims::zeros(t), |acc, g| acc.add(g));
    let longer_total = longer.map(|l| l.iter().fold(GradedDims::zeros(t), |acc, g| acc.add(g)));
    let mut flags = Vec::with_capacity(t);
    let mut clean = true;
    for k in 0..t {
        clean &= next.get(k) == 0;
        if let Some(l) = &longer_total {
            clean &= l.get(k) == dims.get(k);
        }
        flags.push(clean);
    }
    Ok(CofiberHomotopy { dims, by_weight, certified_degree: t.saturating_sub(1), flags, weight_bound: w_bound, bar_bound: n_bound })
}

/// The class of `x^s` in `π_{ns}` of `S(ℓ, n)`, as a shuffle power of the
/// generator at level `ns` of the weight-`s` component.
pub fn generator_power<F: Field>(b: &WeightGradedAlgebra<F>, n: usize, s: usize) -> Result<SparseVec<F::Elem>> {
    if s == 0 {
        return Err(Error::Bounds("power must be positive".into()));
    }
    let x: SparseVec<F::Elem> = vec![(0, b.field().one())];
    let mut acc = x.clone();
    for i in 1..s {
        acc = b.shuffle_product(i, &acc, n * i, 1, &x, n)?;
    }
    Ok(acc)
}

/// The cell model of the cofiber of `f: S(ℓ, n) → S(ℓ, n')`: a cell of
/// dimension `n + 1` attached to the generator cell of `S(ℓ, n')` along the
/// image of the top generator.
pub fn attach_cofiber_cell<F: Field>(f: &AlgebraMap<F>) -> Result<CellAlgebra<F>> {
    let field = f.field.clone();
    let n_target = (0..=f.target.truncation())
        .find(|&m| f.target.base().level_dim(m) > 0)
        .ok_or_else(|| Error::Unsupported("target has no generators".into()))?;
    if f.target.base().level_dim(n_target) != 1 {
        return Err(Error::Unsupported("cell model needs a target sphere on one generator".into()));
    }
    let gens = surjection::masks(f.degree, n_target);
    let basis = f.target.basis(f.weight, f.degree);
    let attach = f
        .cycle
        .iter()
        .map(|(i, x)| {
            let mut mono: Monomial = basis[*i].iter().map(|&g| pack(0, gens[g as usize])).collect();
            mono.sort_unstable();
            (mono, x.clone())
        })
        .collect();
    let mut alg = CellAlgebra::new(&field, 1);
    alg.add_cell(n_target, vec![1], Vec::new())?;
    alg.add_cell(f.degree + 1, vec![f.weight as u32], attach)?;
    Ok(alg)
}

/// Degrees paired with dimensions, for tables that may extend past the computed range.
pub type SparseDims = Vec<(usize, usize)>;

/// Computed and tabulated data for `A⟨r,s⟩`, the cofiber of `S(2rs) → S(2r)`
/// representing `x^s`, over the rationals.
#[derive(Clone, Debug)]
pub struct CofiberReport {
    pub r: usize,
    pub s: usize,
    pub truncation: usize,
    pub weight_bound: usize,
    pub bar_bound: usize,
    pub pi: CofiberHomotopy,
    /// `ℓ` in degrees `2ri`, `0 ≤ i < s`.
    pub pi_table: SparseDims,
    /// `ℓ` in degrees `2r` and `2rs + 1`.
    pub hq_table: SparseDims,
    /// `H^Q` of the cell model, degrees `0..=T`.
    pub hq_computed: GradedDims,
    /// `π` of the cell model, weights `0..=W`, degrees `0..T`.
    pub pi_cell_model: GradedDims,
}

impl CofiberReport {
    pub fn certified_degree(&self) -> usize {
        self.pi.certified_degree
    }

    /// The tabulated `π` dims over degrees `0..=certified_degree`.
    pub fn pi_table_dims(&self) -> GradedDims {
        let len = self.pi.certified_degree + 1;
        let mut v = vec![0; len];
        for &(d, q) in &self.pi_table {
            if d < len {
                v[d] = q;
            }
        }
        GradedDims(v)
    }

    /// Degrees in the certified and stable range where the bar computation
    /// disagrees with the table.
    pub fn mismatches(&self) -> Vec<usize> {
        let table = self.pi_table_dims();
        (0..=self.pi.certified_degree)
            .filter(|&k| self.pi.flags[k] && self.pi.dims.get(k) != table.get(k))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let sparse = |v: &SparseDims| v.iter().map(|(d, q)| json!({"degree": d, "dim": q})).collect::<Vec<_>>();
        json!({
            "r": self.r,
            "s": self.s,
            "bounds": {"T": self.truncation, "W": self.weight_bound, "N": self.bar_bound},
            "pi": self.pi.dims,
            "pi_flags": self.pi.flags,
            "pi_table": sparse(&self.pi_table),
            "pi_cell_model": self.pi_cell_model,
            "hq": sparse(&self.hq_table),
            "hq_computed": self.hq_computed,
            "certified_degree": self.pi.certified_degree,
        })
    }
}

/// The representing map `S(2rs) → S(2r)` of `x^s` over the rationals,
/// through level `t`.
pub fn a_rs_map(r: usize, s: usize, t: usize) -> Result<AlgebraMap<Rationals>> {
    if r == 0 || s == 0 {
        return Err(Error::Bounds("r and s must be positive".into()));
    }
    let n = 2 * r;
    if t < 2 * r * s + 1 {
        return Err(Error::Truncation(format!(
            "the class x^{s} lives in degree {}; truncation must be at least {}",
            2 * r * s,
            2 * r * s + 1
        )));
    }
    let b = Arc::new(crate::symalg::sympow::sphere_algebra(&Rationals, 1, n, t, s)?);
    let xs = generator_power(&b, n, s)?;
    representing_map(&b, 2 * r * s, s, xs)
}

/// Computes `π_* A⟨r,s⟩` by the bar construction through degree `t - 1`,
/// weight `w`, bar length `n_bound`; `H^Q` from the cell model.
pub fn a_rs_tables(r: usize, s: usize, t: usize, w: usize, n_bound: usize) -> Result<CofiberReport> {
    let deg = 2 * r * s;
    let map_levels = t.max(deg + 1);
    let f_full = a_rs_map(r, s, map_levels)?;
    let f = if map_levels == t { f_full.clone() } else { restrict(&f_full, t)? };
    let pi = cofiber_homotopy(&f, n_bound, w)?;
    let cell = attach_cofiber_cell(&f_full)?;
    let mut pi_cell = GradedDims::zeros(t);
    for d in 0..=w as u32 {
        pi_cell = pi_cell.add(&weight_homotopy(&cell, d, t, false)?);
    }
    let (_, lin) = cell.linear_complex(None, t.max(deg + 1))?;
    let hq_computed = lin.homology_dims().truncated(t + 1);
    let pi_table = (0..s).map(|i| (2 * r * i, 1)).collect();
    let hq_table = vec![(2 * r, 1), (deg + 1, 1)];
    let report = CofiberReport {
        r,
        s,
        truncation: t,
        weight_bound: w,
        bar_bound: n_bound,
        pi,
        pi_table,
        hq_table,
        hq_computed,
        pi_cell_model: pi_cell,
    };
    Ok(report)
}

/// The same map seen through a lower truncation.
fn restrict<F: Field>(f: &AlgebraMap<F>, t: usize) -> Result<AlgebraMap<F>> {
    if f.degree > t {
        // No generator exists below its degree: the map is trivial at these levels.
        let target = Arc::new(truncate_algebra(&f.target, t)?);
        let source_base = f.source_base.truncate(t)?;
        return Ok(AlgebraMap {
            field: f.field.clone(),
            degree: f.degree,
            weight: f.weight,
            target,
            source_base,
            cycle: Vec::new(),
            generator_images: f.generator_images[..=t].to_vec(),
        });
    }
    let target = Arc::new(truncate_algebra(&f.target, t)?);
    AlgebraMap::from_moore_cycle(&target, f.degree, f.weight, f.cycle.clone())
}

fn truncate_algebra<F: Field>(a: &WeightGradedAlgebra<F>, t: usize) -> Result<WeightGradedAlgebra<F>> {
    Ok(WeightGradedAlgebra::new(&a.base().truncate(t)?, a.weight_bound()))
}

/// Outcome of [`les_feasibility`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LesVerdict {
    /// The ranks of all maps, in sequence order from the top degree down.
    Feasible { ranks: Vec<i64> },
    /// Exactness forces a negative rank (or a nonzero last rank) at this position.
    Infeasible { position: usize, degree: usize, term: char },
}

impl LesVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LesVerdict::Feasible { .. })
    }
}

/// Whether an exact sequence `⋯ → H_{s+1}C → H_sA → H_sB → H_sC → H_{s-1}A → ⋯ → H_0C → 0`
/// with the given dimensions can exist. Exactness fixes every rank from the
/// top: the rank out of a term is its dimension minus the rank into it.
pub fn les_feasibility(a: &GradedDims, b: &GradedDims, c: &GradedDims) -> LesVerdict {
    let top = a.len().max(b.len()).max(c.len());
    let mut terms = Vec::with_capacity(3 * top);
    for s in (0..top).rev() {
        terms.push((s, 'A', a.get(s)));
        terms.push((s, 'B', b.get(s)));
        terms.push((s, 'C', c.get(s)));
    }
    let mut ranks = Vec::with_capacity(terms.len());
    let mut incoming: i64 = 0;
    for (pos, &(degree, term, dim)) in terms.iter().enumerate() {
        let out = dim as i64 - incoming;
        if out < 0 {
            return LesVerdict::Infeasible { position: pos, degree, term };
        }
        ranks.push(out);
        incoming = out;
    }
    if incoming != 0 {
        let (degree, term, _) = terms[terms.len() - 1];
        return LesVerdict::Infeasible { position: terms.len() - 1, degree, term };
    }
    LesVerdict::Feasible { ranks }
}

/// First degree `k ≤ certified` where `ϑ(B) ≤ ϑ(A)·ϑ(C)` fails, if any.
pub fn cofiber_inequality(a: &GradedDims, b: &GradedDims, c: &GradedDims, certified: usize) -> Option<usize> {
    let len = certified + 1;
    let series = |g: &GradedDims| TruncatedSeries::new((0..len).map(|k| g.get(k) as u64).collect());
    let prod = series(a).mul(&series(c)).expect("dimensions fit in 64 bits");
    series(b).first_violation(&prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symalg::sympow::sphere_algebra;

    #[test]
    fn compositions() {
        assert_eq!(bounded_compositions(2, 2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(bounded_compositions(2, 2, 1), vec![vec![0, 2], vec![2, 0]]);
        assert_eq!(bounded_compositions(0, 0, 0), vec![Vec::<usize>::new()]);
        assert!(bounded_compositions(1, 0, 1).is_empty());
    }

    #[test]
    fn identity_and_zero_maps() {
        let q = Rationals;
        let b = Arc::new(sphere_algebra(&q, 1, 1, 4, 2).unwrap());
        let id = representing_map(&b, 1, 1, vec![(0, q.one())]).unwrap();
        id.check().unwrap();
        for comp in bar_diagonal(&id, 2, 2).unwrap() {
            comp.validate().unwrap();
        }
        let h = cofiber_homotopy(&id, 3, 2).unwrap();
        assert_eq!(h.dims.0, vec![1, 0, 0, 0]);
        assert!(h.flags.iter().all(|&x| x));
        let zero = AlgebraMap::zero(&b, 1, 1).unwrap();
        let hz = cofiber_homotopy(&zero, 3, 3).unwrap();
        // S(1) ⊗ S(2): degrees 0, 1, 2, 3
        assert_eq!(hz.dims.0, vec![1, 1, 1, 1]);
    }

    #[test]
    fn representing_square() {
        let q = Rationals;
        let b = Arc::new(sphere_algebra(&q, 1, 2, 5, 2).unwrap());
        let x2 = generator_power(&b, 2, 2).unwrap();
        let f = representing_map(&b, 4, 2, x2).unwrap();
        f.check().unwrap();
        assert!(!f.cycle().is_empty());
        let cell = attach_cofiber_cell(&f).unwrap();
        assert_eq!(cell.cells().len(), 2);
        let non_cycles = (0..b.component(2).level_dim(4))
            .filter(|&i| matches!(representing_map(&b, 4, 2, vec![(i, q.one())]), Err(Error::NotACycle(_))))
            .count();
        assert!(non_cycles > 0);
    }

    #[test]
    fn les_examples() {
        let x = GradedDims(vec![0, 2, 1]);
        assert!(les_feasibility(&GradedDims::default(), &x, &x).is_feasible());
        let a = GradedDims::concentrated(4, 3, 1);
        let z = GradedDims::zeros(4);
        assert!(!les_feasibility(&a, &z, &z).is_feasible());
    }

    #[test]
    fn lemma_inequality() {
        let a = GradedDims(vec![1, 0, 0, 0, 1]);
        let b = GradedDims(vec![1, 0, 1, 0, 1]);
        let c = GradedDims(vec![1, 0, 1, 0, 0]);
        assert_eq!(cofiber_inequality(&a, &b, &c, 4), None);
        assert_eq!(cofiber_inequality(&a, &b, &GradedDims(vec![1]), 4), Some(2));
    }
}
