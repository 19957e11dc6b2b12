//! Levelwise symmetric powers of an explicit simplicial vector space and the
//! weight-graded symmetric algebra they assemble into.

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{HomologyBasis, Matrix, SparseVec};
use crate::simplicial::{eilenberg_maclane, normalized_chains, GradedDims, SimplicialVectorSpace};
use crate::symalg::homotopy::HurewiczMap;

/// Multiset of level basis indices, sorted; a monomial of the symmetric algebra.
pub type IdxMono = SmallVec<[u32; 8]>;

/// All multisets of size `d` from `0..n`, in lexicographic order.
pub fn multisets(n: usize, d: usize) -> Vec<IdxMono> {
    fn rec(n: u32, d: usize, start: u32, cur: &mut IdxMono, out: &mut Vec<IdxMono>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(n, d, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n as u32, d, 0, &mut IdxMono::new(), &mut out);
    out
}

/// Product of linear forms given as sparse columns, expanded in the
/// monomial basis. The result is unnormalized.
pub(crate) fn expand_product<F: Field>(field: &F, factors: &[&[(usize, F::Elem)]]) -> Vec<(IdxMono, F::Elem)> {
    let mut acc: Vec<(IdxMono, F::Elem)> = vec![(IdxMono::new(), field.one())];
    for col in factors {
        let mut next = Vec::with_capacity(acc.len() * col.len());
        for (mono, x) in &acc {
            for (r, y) in col.iter() {
                let mut m = mono.clone();
                let pos = m.partition_point(|&z| z <= *r as u32);
                m.insert(pos, *r as u32);
                next.push((m, field.mul(x, y)));
            }
        }
        acc = next;
    }
    acc
}

pub(crate) fn collect_terms<F: Field>(
    field: &F,
    index: &FxHashMap<IdxMono, usize>,
    terms: Vec<(IdxMono, F::Elem)>,
) -> SparseVec<F::Elem> {
    let terms = terms.into_iter().map(|(m, x)| (index[&m], x)).collect();
    crate::matrix::normalize(field, terms)
}

fn index_of(basis: &[IdxMono]) -> FxHashMap<IdxMono, usize> {
    basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect()
}

/// Applies `Sym^d` of each linear map to the monomial bases.
fn sym_map<F: Field>(field: &F, map: &Matrix<F>, source: &[IdxMono], target_index: &FxHashMap<IdxMono, usize>) -> Matrix<F> {
    let cols = source
        .iter()
        .map(|mono| {
            let factors: Vec<&[(usize, F::Elem)]> = mono.iter().map(|&a| map.column(a as usize)).collect();
            collect_terms(field, target_index, expand_product(field, &factors))
        })
        .collect();
    Matrix::from_columns(field, target_index.len(), cols).expect("indices come from the target basis")
}

fn symmetric_power_with_bases<F: Field>(
    v: &SimplicialVectorSpace<F>,
    d: usize,
) -> (SimplicialVectorSpace<F>, Vec<Vec<IdxMono>>) {
    let field = v.field();
    let t = v.truncation();
    let bases: Vec<Vec<IdxMono>> = (0..=t).map(|m| multisets(v.level_dim(m), d)).collect();
    let indices: Vec<FxHashMap<IdxMono, usize>> = bases.iter().map(|b| index_of(b)).collect();
    let faces = (1..=t)
        .map(|m| (0..=m).map(|i| sym_map(field, v.face(m, i), &bases[m], &indices[m - 1])).collect())
        .collect();
    let degeneracies = (0..t)
        .map(|m| (0..=m).map(|j| sym_map(field, v.degeneracy(m, j), &bases[m], &indices[m + 1])).collect())
        .collect();
    let dims = bases.iter().map(Vec::len).collect();
    let s = SimplicialVectorSpace::from_parts(field, dims, faces, degeneracies).expect("shapes follow the bases");
    (s, bases)
}

/// `Sym^d V`, levelwise. Level `m` has the monomials of degree `d` in the
/// basis of `V_m`, in lexicographic order; structure maps act multiplicatively.
pub fn symmetric_power<F: Field>(v: &SimplicialVectorSpace<F>, d: usize) -> SimplicialVectorSpace<F> {
    symmetric_power_with_bases(v, d).0
}

/// `Sym(V)` through weight `W`, with its multiplication.
#[derive(Clone, Debug)]
pub struct WeightGradedAlgebra<F: Field> {
    field: F,
    base: SimplicialVectorSpace<F>,
    weight_bound: usize,
    components: Vec<SimplicialVectorSpace<F>>,
    bases: Vec<Vec<Vec<IdxMono>>>,
}

impl<F: Field> WeightGradedAlgebra<F> {
    pub fn new(base: &SimplicialVectorSpace<F>, weight_bound: usize) -> Self {
        let (components, bases) = (0..=weight_bound).map(|d| symmetric_power_with_bases(base, d)).unzip();
        WeightGradedAlgebra { field: base.field().clone(), base: base.clone(), weight_bound, components, bases }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn weight_bound(&self) -> usize {
        self.weight_bound
    }

    pub fn truncation(&self) -> usize {
        self.components[0].truncation()
    }

    /// The generating object, `Sym^1`.
    pub fn base(&self) -> &SimplicialVectorSpace<F> {
        &self.base
    }

    pub fn component(&self, d: usize) -> &SimplicialVectorSpace<F> {
        &self.components[d]
    }

    /// Monomial basis of `Sym^d` at level `m`.
    pub fn basis(&self, d: usize, m: usize) -> &[IdxMono] {
        &self.bases[d][m]
    }

    /// `Sym^a ⊗ Sym^b → Sym^{a+b}` at level `m`; source basis `(i, j) ↦ i·dim_b + j`.
    pub fn multiplication(&self, a: usize, b: usize, m: usize) -> Result<Matrix<F>> {
        if a + b > self.weight_bound {
            return Err(Error::Bounds(format!("weight {} exceeds the bound {}", a + b, self.weight_bound)));
        }
        let target = index_of(&self.bases[a + b][m]);
        let mut cols = Vec::new();
        for x in &self.bases[a][m] {
            for y in &self.bases[b][m] {
                let mut z: IdxMono = x.iter().chain(y.iter()).copied().collect();
                z.sort_unstable();
                cols.push(vec![(target[&z], self.field.one())]);
            }
        }
        Matrix::from_columns(&self.field, target.len(), cols)
    }

    /// Product of `x ∈ Sym^a` and `y ∈ Sym^b` at level `m`.
    pub fn multiply(&self, a: usize, x: &[(usize, F::Elem)], b: usize, y: &[(usize, F::Elem)], m: usize) -> Result<SparseVec<F::Elem>> {
        if a + b > self.weight_bound {
            return Err(Error::Bounds(format!("weight {} exceeds the bound {}", a + b, self.weight_bound)));
        }
        let target = index_of(&self.bases[a + b][m]);
        let mut terms = Vec::with_capacity(x.len() * y.len());
        for (i, u) in x {
            for (j, v) in y {
                let mut z: IdxMono = self.bases[a][m][*i].iter().chain(self.bases[b][m][*j].iter()).copied().collect();
                z.sort_unstable();
                terms.push((target[&z], self.field.mul(u, v)));
            }
        }
        Ok(crate::matrix::normalize(&self.field, terms))
    }

    /// Shuffle product of `x ∈ Sym^a` at level `p` and `y ∈ Sym^b` at level
    /// `q`, landing at level `p + q`: the sum over `(p, q)`-shuffles `(μ, ν)`
    /// of `sgn(μ, ν) · (s_ν x)(s_μ y)`. On normalized cycles it computes the
    /// product in homotopy.
    pub fn shuffle_product(
        &self,
        a: usize,
        x: &[(usize, F::Elem)],
        p: usize,
        b: usize,
        y: &[(usize, F::Elem)],
        q: usize,
    ) -> Result<SparseVec<F::Elem>> {
        let m = p + q;
        if m > self.truncation() {
            return Err(Error::Bounds(format!("level {m} exceeds the truncation {}", self.truncation())));
        }
        let mut acc: SparseVec<F::Elem> = Vec::new();
        for mu in crate::surjection::masks(m, p) {
            let mus: Vec<usize> = (0..m).filter(|&i| mu >> i & 1 == 1).collect();
            let nus: Vec<usize> = (0..m).filter(|&i| mu >> i & 1 == 0).collect();
            let inversions: usize = mus.iter().map(|&u| nus.iter().filter(|&&v| v < u).count()).sum();
            let sx = self.components[a].apply_degeneracies(p, &nus, x)?;
            let sy = self.components[b].apply_degeneracies(q, &mus, y)?;
            let prod = self.multiply(a, &sx, b, &sy, m)?;
            acc = crate::matrix::axpy(&self.field, &acc, &self.field.neg(&self.field.sign(inversions)), &prod);
        }
        Ok(acc)
    }

    /// Checks commutativity, associativity, and that faces and degeneracies
    /// are multiplicative, for all weights and levels in range.
    pub fn check_algebra_identities(&self) -> Result<()> {
        let w = self.weight_bound;
        let t = self.truncation();
        let fail = |msg: String| Err(Error::Mismatch(msg));
        for m in 0..=t {
            for a in 0..=w {
                for b in 0..=w - a {
                    let mab = self.multiplication(a, b, m)?;
                    let mba = self.multiplication(b, a, m)?;
                    let (da, db) = (self.bases[a][m].len(), self.bases[b][m].len());
                    let swap: Vec<usize> = (0..da * db).map(|k| (k % da) * db + k / da).collect();
                    let rows: Vec<usize> = (0..mab.rows()).collect();
                    if mba.permuted(&rows, &swap) != mab {
                        return fail(format!("multiplication {a}x{b} not commutative at level {m}"));
                    }
                    for c in 0..=w - a - b {
                        let left = self.multiplication(a + b, c, m)?.mul(&mab.kron(&Matrix::identity(&self.field, self.bases[c][m].len())))?;
                        let right = self
                            .multiplication(a, b + c, m)?
                            .mul(&Matrix::identity(&self.field, da).kron(&self.multiplication(b, c, m)?))?;
                        if left != right {
                            return fail(format!("multiplication {a}x{b}x{c} not associative at level {m}"));
                        }
                    }
                    if m >= 1 {
                        let mab_low = self.multiplication(a, b, m - 1)?;
                        for i in 0..=m {
                            let lhs = self.components[a + b].face(m, i).mul(&mab)?;
                            let rhs = mab_low.mul(&self.components[a].face(m, i).kron(self.components[b].face(m, i)))?;
                            if lhs != rhs {
                                return fail(format!("d_{i} not multiplicative on weights {a},{b} at level {m}"));
                            }
                        }
                    }
                    if m < t {
                        let mab_high = self.multiplication(a, b, m + 1)?;
                        for j in 0..=m {
                            let lhs = self.components[a + b].degeneracy(m, j).mul(&mab)?;
                            let rhs = mab_high
                                .mul(&self.components[a].degeneracy(m, j).kron(self.components[b].degeneracy(m, j)))?;
                            if lhs != rhs {
                                return fail(format!("s_{j} not multiplicative on weights {a},{b} at level {m}"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Homotopy of each weight component, degrees `0..T`.
    pub fn homotopy_by_weight(&self) -> Result<Vec<GradedDims>> {
        self.components.iter().map(crate::simplicial::homotopy_dims).collect()
    }

    /// Homotopy of the whole algebra through weight `W`.
    pub fn homotopy_dims(&self) -> Result<GradedDims> {
        let by_weight = self.homotopy_by_weight()?;
        Ok(by_weight.iter().fold(GradedDims::zeros(self.truncation()), |acc, g| acc.add(g)))
    }

    /// `QA = IA/(IA)^2`, which for a free algebra is the generating object.
    pub fn indecomposables(&self) -> SimplicialVectorSpace<F> {
        self.base.clone()
    }

    /// The map `π_s(IA) → π_s(QA)` induced by the projection onto weight one.
    /// The source basis lists weight 1 first, then weights `2..=W`.
    pub fn hurewicz(&self, s: usize) -> Result<HurewiczMap<F>> {
        let t = self.truncation();
        if s + 1 > t {
            return Err(Error::Truncation(format!("degree {s} needs truncation at least {}", s + 1)));
        }
        if self.weight_bound == 0 {
            return Ok(HurewiczMap::new(s, Matrix::zeros(&self.field, 0, 0)));
        }
        let chains: Vec<_> = self.components[1..].iter().map(normalized_chains).collect::<Result<_>>()?;
        let boundary = |c: &crate::simplicial::ChainComplex<F>, m: usize| c.boundary(m).clone();
        if chains[0].homology_dims().get(0) != 0 {
            return Err(Error::Unsupported("the generating object is not connected".into()));
        }
        let q_basis = HomologyBasis::new(&boundary(&chains[0], s + 1), &boundary(&chains[0], s))?;
        let mut cols = Vec::new();
        for (k, c) in chains.iter().enumerate() {
            let hb = HomologyBasis::new(&boundary(c, s + 1), &boundary(c, s))?;
            for z in hb.representatives() {
                if k == 0 {
                    let coords = q_basis.coordinates(&z).expect("a cycle of the same complex");
                    cols.push(
                        coords.into_iter().enumerate().filter(|(_, x)| !self.field.is_zero(x)).collect::<SparseVec<_>>(),
                    );
                } else {
                    cols.push(Vec::new());
                }
            }
        }
        Ok(HurewiczMap::new(s, Matrix::from_columns(&self.field, q_basis.dim(), cols)?))
    }
}

/// The explicit sphere algebra `S(V, n) = Sym(K(V, n))`, `dim V = q`, through
/// level `t` and weight `w`.
pub fn sphere_algebra<F: Field>(field: &F, q: usize, n: usize, t: usize, w: usize) -> Result<WeightGradedAlgebra<F>> {
    if w == 0 {
        return Err(Error::Bounds("weight bound must be at least 1".into()));
    }
    let k = eilenberg_maclane(field, q, n, t)?;
    Ok(WeightGradedAlgebra::new(&k, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::simplicial::{homotopy_dims, homotopy_dims_unnormalized};

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(3, 2).len(), 6);
        assert_eq!(multisets(0, 0).len(), 1);
        assert_eq!(multisets(0, 2).len(), 0);
        assert_eq!(multisets(2, 2), vec![IdxMono::from_slice(&[0, 0]), IdxMono::from_slice(&[0, 1]), IdxMono::from_slice(&[1, 1])]);
    }

    #[test]
    fn low_powers() {
        let q = Rationals;
        let k = eilenberg_maclane(&q, 1, 2, 4).unwrap();
        let s0 = symmetric_power(&k, 0);
        assert_eq!(s0, SimplicialVectorSpace::constant(&q, 4));
        assert_eq!(symmetric_power(&k, 1), k);
        let s2 = symmetric_power(&k, 2);
        s2.validate().unwrap();
        assert_eq!(s2.level_dims(), &[0, 0, 1, 6, 21]);
    }

    #[test]
    fn sphere_algebra_identities_and_homotopy() {
        let f2 = PrimeField::new(2).unwrap();
        let a = sphere_algebra(&f2, 1, 1, 4, 3).unwrap();
        a.check_algebra_identities().unwrap();
        for c in 0..=3 {
            assert_eq!(homotopy_dims(a.component(c)).unwrap(), homotopy_dims_unnormalized(a.component(c)).unwrap());
        }
        assert_eq!(a.homotopy_dims().unwrap().0, vec![1, 1, 0, 0]);
        let q = Rationals;
        let b = sphere_algebra(&q, 1, 2, 5, 2).unwrap();
        assert_eq!(b.homotopy_dims().unwrap().0, vec![1, 0, 1, 0, 1]);
        assert_eq!(homotopy_dims(&b.indecomposables()).unwrap().0, vec![0, 0, 1, 0, 0]);
    }

    #[test]
    fn explicit_hurewicz() {
        let q = Rationals;
        let a = sphere_algebra(&q, 1, 2, 5, 2).unwrap();
        let h2 = a.hurewicz(2).unwrap();
        assert!(h2.is_isomorphism());
        let h4 = a.hurewicz(4).unwrap();
        assert_eq!((h4.source_dim(), h4.target_dim(), h4.rank()), (1, 0, 0));
    }

    #[test]
    fn shuffle_square_generates_degree_four() {
        let q = Rationals;
        let a = sphere_algebra(&q, 1, 2, 5, 2).unwrap();
        let x = vec![(0, q.one())];
        let x2 = a.shuffle_product(1, &x, 2, 1, &x, 2).unwrap();
        let n = normalized_chains(a.component(2)).unwrap();
        let z = crate::simplicial::normalized_projection(a.component(2), 4, x2);
        let hb = HomologyBasis::new(n.boundary(5), n.boundary(4)).unwrap();
        let coords = hb.coordinates(&z).expect("x^2 is a cycle");
        assert_eq!(coords.len(), 1);
        assert!(!q.is_zero(&coords[0]));
        // odd generators square to zero in homotopy
        let b = sphere_algebra(&q, 1, 1, 3, 2).unwrap();
        let y2 = b.shuffle_product(1, &x, 1, 1, &x, 1).unwrap();
        let nb = normalized_chains(b.component(2)).unwrap();
        let hb = HomologyBasis::new(nb.boundary(3), nb.boundary(2)).unwrap();
        let zb = crate::simplicial::normalized_projection(b.component(2), 2, y2);
        assert!(hb.coordinates(&zb).unwrap().iter().all(|c| q.is_zero(c)));
    }
}
