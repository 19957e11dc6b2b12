//! Truncated simplicial vector spaces, their chain complexes, and homotopy.
//!
//! An object carries levels `0..=T` with explicit face and degeneracy
//! matrices. Homotopy is read off the normalized chains and is certified
//! only through degree `T - 1`; degree `T` cycles have no level `T + 1` to
//! bound them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::matrix::{kernel_basis, rank_unchecked, Echelon, Matrix, SparseVec};
use crate::surjection::{self, Face};

/// Dimensions indexed by degree.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedDims(pub Vec<usize>);

impl GradedDims {
    pub fn zeros(len: usize) -> Self {
        GradedDims(vec![0; len])
    }

    /// Dimension in degree `s`; zero outside the stored range.
    pub fn get(&self, s: usize) -> usize {
        self.0.get(s).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Degrees with nonzero dimension.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&s| self.0[s] != 0).collect()
    }

    pub fn truncated(&self, len: usize) -> GradedDims {
        GradedDims((0..len).map(|s| self.get(s)).collect())
    }

    /// Graded convolution, truncated to the shorter range.
    pub fn convolve(&self, other: &GradedDims) -> GradedDims {
        let len = self.len().min(other.len());
        GradedDims((0..len).map(|n| (0..=n).map(|i| self.get(i) * other.get(n - i)).sum()).collect())
    }

    pub fn add(&self, other: &GradedDims) -> GradedDims {
        let len = self.len().max(other.len());
        GradedDims((0..len).map(|s| self.get(s) + other.get(s)).collect())
    }

    /// `q` in degree `n`, zero elsewhere, over `len` degrees.
    pub fn concentrated(len: usize, n: usize, q: usize) -> GradedDims {
        let mut v = vec![0; len];
        if n < len {
            v[n] = q;
        }
        GradedDims(v)
    }
}

impl fmt::Debug for GradedDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<usize>> for GradedDims {
    fn from(v: Vec<usize>) -> Self {
        GradedDims(v)
    }
}

/// A bounded chain complex `C_T → ⋯ → C_0`.
#[derive(Clone, Debug)]
pub struct ChainComplex<F: Field> {
    field: F,
    dims: Vec<usize>,
    /// `boundaries[m]: C_m → C_{m-1}` for `m ≥ 1`; index 0 holds the zero map to nothing.
    boundaries: Vec<Matrix<F>>,
}

impl<F: Field> ChainComplex<F> {
    /// `boundaries[m - 1]` is `∂_m : C_m → C_{m-1}` for `m = 1..=T`.
    pub fn new(field: &F, dims: Vec<usize>, boundaries: Vec<Matrix<F>>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Dimension("a chain complex needs at least degree 0".into()));
        }
        if boundaries.len() + 1 != dims.len() {
            return Err(Error::Dimension(format!(
                "{} degrees need {} differentials, found {}",
                dims.len(),
                dims.len() - 1,
                boundaries.len()
            )));
        }
        let mut all = Vec::with_capacity(dims.len());
        all.push(Matrix::zeros(field, 0, dims[0]));
        for (k, d) in boundaries.into_iter().enumerate() {
            let m = k + 1;
            d.check_entries(field)?;
            if d.rows() != dims[m - 1] || d.cols() != dims[m] {
                return Err(Error::Dimension(format!(
                    "∂_{m} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    dims[m - 1],
                    dims[m]
                )));
            }
            all.push(d);
        }
        let cc = ChainComplex { field: field.clone(), dims, boundaries: all };
        cc.check_squares_to_zero()?;
        Ok(cc)
    }

    fn check_squares_to_zero(&self) -> Result<()> {
        for m in 2..self.dims.len() {
            if !self.boundaries[m - 1].mul(&self.boundaries[m])?.is_zero() {
                return Err(Error::NotAComplex { degree: m });
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> GradedDims {
        GradedDims(self.dims.clone())
    }

    pub fn dim(&self, m: usize) -> usize {
        self.dims.get(m).copied().unwrap_or(0)
    }

    /// `∂_m`; `m = 0` gives the zero map out of `C_0`.
    pub fn boundary(&self, m: usize) -> &Matrix<F> {
        &self.boundaries[m]
    }

    /// Ranks of `∂_m` for every `m`.
    pub fn boundary_ranks(&self) -> Vec<usize> {
        self.boundaries.iter().map(rank_unchecked).collect()
    }

    /// Homology dimensions in degrees `0..=top`. The top degree counts all
    /// cycles, so only degrees below it are trustworthy as truncations.
    pub fn homology_dims(&self) -> GradedDims {
        let ranks = self.boundary_ranks();
        let top = self.top_degree();
        GradedDims(
            (0..=top)
                .map(|m| {
                    let incoming = if m < top { ranks[m + 1] } else { 0 };
                    self.dims[m] - ranks[m] - incoming
                })
                .collect(),
        )
    }
}

/// A finite-type simplicial vector space truncated at level `T`.
#[derive(Clone, Debug)]
pub struct SimplicialVectorSpace<F: Field> {
    field: F,
    level_dims: Vec<usize>,
    /// `faces[m][i]: V_m → V_{m-1}`; `faces[0]` is empty.
    faces: Vec<Vec<Matrix<F>>>,
    /// `degeneracies[m][j]: V_m → V_{m+1}` for `m < T`.
    degeneracies: Vec<Vec<Matrix<F>>>,
}

impl<F: Field> PartialEq for SimplicialVectorSpace<F> {
    fn eq(&self, other: &Self) -> bool {
        self.level_dims == other.level_dims && self.faces == other.faces && self.degeneracies == other.degeneracies
    }
}

impl<F: Field> SimplicialVectorSpace<F> {
    /// `faces[m - 1]` lists `d_0..=d_m` out of level `m` (for `m = 1..=T`);
    /// `degeneracies[m]` lists `s_0..=s_m` out of level `m` (for `m < T`).
    /// Shapes and all simplicial identities are checked.
    pub fn new(
        field: &F,
        level_dims: Vec<usize>,
        faces: Vec<Vec<Matrix<F>>>,
        degeneracies: Vec<Vec<Matrix<F>>>,
    ) -> Result<Self> {
        let v = Self::from_parts(field, level_dims, faces, degeneracies)?;
        v.validate()?;
        Ok(v)
    }

    /// Shape checks only; the caller guarantees the simplicial identities.
    pub(crate) fn from_parts(
        field: &F,
        level_dims: Vec<usize>,
        faces: Vec<Vec<Matrix<F>>>,
        degeneracies: Vec<Vec<Matrix<F>>>,
    ) -> Result<Self> {
        if level_dims.is_empty() {
            return Err(Error::Dimension("need at least level 0".into()));
        }
        let t = level_dims.len() - 1;
        if faces.len() != t || degeneracies.len() != t {
            return Err(Error::Dimension(format!(
                "truncation {t} needs {t} face lists and {t} degeneracy lists, found {} and {}",
                faces.len(),
                degeneracies.len()
            )));
        }
        for (k, list) in faces.iter().enumerate() {
            let m = k + 1;
            if list.len() != m + 1 {
                return Err(Error::Dimension(format!("level {m} needs {} faces, found {}", m + 1, list.len())));
            }
            for (i, d) in list.iter().enumerate() {
                d.check_entries(field)?;
                if d.rows() != level_dims[m - 1] || d.cols() != level_dims[m] {
                    return Err(Error::Dimension(format!("d_{i} out of level {m} has the wrong shape")));
                }
            }
        }
        for (m, list) in degeneracies.iter().enumerate() {
            if list.len() != m + 1 {
                return Err(Error::Dimension(format!(
                    "level {m} needs {} degeneracies, found {}",
                    m + 1,
                    list.len()
                )));
            }
            for (j, s) in list.iter().enumerate() {
                s.check_entries(field)?;
                if s.rows() != level_dims[m + 1] || s.cols() != level_dims[m] {
                    return Err(Error::Dimension(format!("s_{j} out of level {m} has the wrong shape")));
                }
            }
        }
        let mut all_faces = Vec::with_capacity(t + 1);
        all_faces.push(Vec::new());
        all_faces.extend(faces);
        Ok(SimplicialVectorSpace { field: field.clone(), level_dims, faces: all_faces, degeneracies })
    }

    /// Re-checks every simplicial identity that fits in levels `0..=T`.
    pub fn validate(&self) -> Result<()> {
        let t = self.truncation();
        let fail = |msg: String| Err(Error::SimplicialIdentity(msg));
        // d_i d_j = d_{j-1} d_i for i < j, out of level m
        for m in 2..=t {
            for j in 0..=m {
                for i in 0..j {
                    let lhs = self.faces[m - 1][i].mul(&self.faces[m][j])?;
                    let rhs = self.faces[m - 1][j - 1].mul(&self.faces[m][i])?;
                    if lhs != rhs {
                        return fail(format!("d_{i} d_{j} != d_{} d_{i} on level {m}", j - 1));
                    }
                }
            }
        }
        // identities for d_i s_j out of level m (s_j: m -> m+1, d_i: m+1 -> m)
        for m in 0..t {
            for j in 0..=m {
                for i in 0..=m + 1 {
                    let lhs = self.faces[m + 1][i].mul(&self.degeneracies[m][j])?;
                    let ok = if i < j {
                        lhs == self.degeneracies[m - 1][j - 1].mul(&self.faces[m][i])?
                    } else if i == j || i == j + 1 {
                        lhs == Matrix::identity(&self.field, self.level_dims[m])
                    } else {
                        lhs == self.degeneracies[m - 1][j].mul(&self.faces[m][i - 1])?
                    };
                    if !ok {
                        return fail(format!("d_{i} s_{j} relation fails on level {m}"));
                    }
                }
            }
        }
        // s_i s_j = s_{j+1} s_i for i <= j, out of level m
        for m in 0..t.saturating_sub(1) {
            for j in 0..=m {
                for i in 0..=j {
                    let lhs = self.degeneracies[m + 1][i].mul(&self.degeneracies[m][j])?;
                    let rhs = self.degeneracies[m + 1][j + 1].mul(&self.degeneracies[m][i])?;
                    if lhs != rhs {
                        return fail(format!("s_{i} s_{j} != s_{} s_{i} on level {m}", j + 1));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn truncation(&self) -> usize {
        self.level_dims.len() - 1
    }

    pub fn level_dims(&self) -> &[usize] {
        &self.level_dims
    }

    pub fn level_dim(&self, m: usize) -> usize {
        self.level_dims[m]
    }

    /// `d_i` out of level `m ≥ 1`.
    pub fn face(&self, m: usize, i: usize) -> &Matrix<F> {
        &self.faces[m][i]
    }

    /// `s_j` out of level `m < T`.
    pub fn degeneracy(&self, m: usize, j: usize) -> &Matrix<F> {
        &self.degeneracies[m][j]
    }

    /// The zero object.
    pub fn zero(field: &F, t: usize) -> Self {
        Self::constant_of_dim(field, t, 0)
    }

    /// The constant object on the ground field: every level `ℓ`, every map the identity.
    pub fn constant(field: &F, t: usize) -> Self {
        Self::constant_of_dim(field, t, 1)
    }

    fn constant_of_dim(field: &F, t: usize, dim: usize) -> Self {
        let id = Matrix::identity(field, dim);
        SimplicialVectorSpace {
            field: field.clone(),
            level_dims: vec![dim; t + 1],
            faces: (0..=t).map(|m| if m == 0 { Vec::new() } else { vec![id.clone(); m + 1] }).collect(),
            degeneracies: (0..t).map(|m| vec![id.clone(); m + 1]).collect(),
        }
    }

    /// Levels `0..=t` of this object.
    pub fn truncate(&self, t: usize) -> Result<Self> {
        if t > self.truncation() {
            return Err(Error::Bounds(format!("cannot extend truncation {} to {t}", self.truncation())));
        }
        Ok(SimplicialVectorSpace {
            field: self.field.clone(),
            level_dims: self.level_dims[..=t].to_vec(),
            faces: self.faces[..=t].to_vec(),
            degeneracies: self.degeneracies[..t].to_vec(),
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field.spec() != other.field.spec() {
            return Err(Error::CharacteristicMismatch { expected: self.field.spec(), found: other.field.spec() });
        }
        if self.truncation() != other.truncation() {
            return Err(Error::Bounds(format!(
                "truncations differ: {} vs {}",
                self.truncation(),
                other.truncation()
            )));
        }
        Ok(())
    }

    /// Levelwise direct sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.levelwise(other, |a, b| a.direct_sum(b), |a, b| a + b))
    }

    /// Levelwise tensor product with diagonal structure maps. The basis of
    /// level `m` is `(a, b) ↦ a · dim W_m + b`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.levelwise(other, |a, b| a.kron(b), |a, b| a * b))
    }

    fn levelwise(
        &self,
        other: &Self,
        op: impl Fn(&Matrix<F>, &Matrix<F>) -> Matrix<F>,
        dim: impl Fn(usize, usize) -> usize,
    ) -> Self {
        let level_dims = self.level_dims.iter().zip(&other.level_dims).map(|(&a, &b)| dim(a, b)).collect();
        let faces = self
            .faces
            .iter()
            .zip(&other.faces)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| op(x, y)).collect())
            .collect();
        let degeneracies = self
            .degeneracies
            .iter()
            .zip(&other.degeneracies)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| op(x, y)).collect())
            .collect();
        SimplicialVectorSpace { field: self.field.clone(), level_dims, faces, degeneracies }
    }

    /// Conjugates level `m` by the invertible `change[m]` (new basis
    /// coordinates `= change[m] · old`), given together with its inverse.
    pub fn change_basis(&self, change: &[(Matrix<F>, Matrix<F>)]) -> Result<Self> {
        let t = self.truncation();
        if change.len() != t + 1 {
            return Err(Error::Dimension("need one basis change per level".into()));
        }
        for (m, (p, pinv)) in change.iter().enumerate() {
            if p.mul(pinv)? != Matrix::identity(&self.field, self.level_dims[m]) {
                return Err(Error::Dimension(format!("basis change at level {m} is not inverted by its partner")));
            }
        }
        let mut faces = vec![Vec::new()];
        for m in 1..=t {
            faces.push(
                self.faces[m]
                    .iter()
                    .map(|d| change[m - 1].0.mul(d)?.mul(&change[m].1))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let degeneracies = (0..t)
            .map(|m| {
                self.degeneracies[m]
                    .iter()
                    .map(|s| change[m + 1].0.mul(s)?.mul(&change[m].1))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SimplicialVectorSpace { field: self.field.clone(), level_dims: self.level_dims.clone(), faces, degeneracies })
    }

    /// Applies `s_{js[0]}`, then `s_{js[1]}`, and so on, to `x` at level `m`.
    pub fn apply_degeneracies(&self, m: usize, js: &[usize], x: &[(usize, F::Elem)]) -> Result<SparseVec<F::Elem>> {
        if m + js.len() > self.truncation() {
            return Err(Error::Bounds(format!("level {} exceeds the truncation", m + js.len())));
        }
        let mut v = x.to_vec();
        for (k, &j) in js.iter().enumerate() {
            if j > m + k {
                return Err(Error::Bounds(format!("s_{j} is not defined on level {}", m + k)));
            }
            v = self.degeneracies[m + k][j].apply(&v);
        }
        Ok(v)
    }

    /// `σ^* x` for `x` at level `k` and the surjection `σ: [m] ↠ [k]` with mask `mask`.
    pub fn apply_surjection(&self, mask: u64, m: usize, k: usize, x: &[(usize, F::Elem)]) -> Result<SparseVec<F::Elem>> {
        if mask.count_ones() as usize != k || (m < 64 && mask >> m != 0) {
            return Err(Error::Bounds(format!("mask {mask:b} is not a surjection [{m}] -> [{k}]")));
        }
        let zeros: Vec<usize> = (0..m).filter(|&j| mask >> j & 1 == 0).collect();
        self.apply_degeneracies(k, &zeros, x)
    }

    /// Basis of the vectors at level `m` killed by every face (all of level 0 when `m = 0`).
    pub fn moore_cycles(&self, m: usize) -> Result<Matrix<F>> {
        if m == 0 {
            return Ok(Matrix::identity(&self.field, self.level_dims[0]));
        }
        let mut stacked = self.faces[m][0].clone();
        for d in &self.faces[m][1..] {
            stacked = stacked.stack(d)?;
        }
        kernel_basis(&stacked, &self.field)
    }

    /// `Σ (-1)^i d_i` out of level `m` on the full level.
    fn alternating_face_sum(&self, m: usize) -> Matrix<F> {
        let mut acc = Matrix::zeros(&self.field, self.level_dims[m - 1], self.level_dims[m]);
        for (i, d) in self.faces[m].iter().enumerate() {
            acc = acc.combine(d, &self.field.sign(i)).expect("face shapes agree");
        }
        acc
    }

    /// Serializes to the documented JSON layout.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "field": self.field.spec().characteristic(),
            "truncation": self.truncation(),
            "level_dims": self.level_dims,
            "faces": self.faces[1..].iter().map(|l| l.iter().map(Matrix::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "degeneracies": self.degeneracies.iter().map(|l| l.iter().map(Matrix::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// Parses the JSON layout of [`to_json`](Self::to_json) and validates the result.
    pub fn from_json(field: &F, v: &serde_json::Value) -> Result<Self> {
        let raw: RawSimplicial = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let spec = FieldSpec::new(raw.field)?;
        if spec != field.spec() {
            return Err(Error::CharacteristicMismatch { expected: field.spec(), found: spec });
        }
        if raw.level_dims.len() != raw.truncation + 1 {
            return Err(Error::Dimension("level_dims length must be truncation + 1".into()));
        }
        let dims = &raw.level_dims;
        let faces = raw
            .faces
            .iter()
            .enumerate()
            .map(|(k, list)| {
                list.iter()
                    .map(|mv| Matrix::from_json(field, dims[k], *dims.get(k + 1).unwrap_or(&0), mv))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let degeneracies = raw
            .degeneracies
            .iter()
            .enumerate()
            .map(|(m, list)| {
                list.iter()
                    .map(|mv| Matrix::from_json(field, *dims.get(m + 1).unwrap_or(&0), dims[m], mv))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, raw.level_dims.clone(), faces, degeneracies)
    }
}

#[derive(Deserialize)]
struct RawSimplicial {
    field: u64,
    truncation: usize,
    level_dims: Vec<usize>,
    faces: Vec<Vec<serde_json::Value>>,
    degeneracies: Vec<Vec<serde_json::Value>>,
}

/// Quotient of one level by its degenerate subspace.
struct DegenerateQuotient<F: Field> {
    /// Echelon basis of the degenerate subspace; `None` when it is spanned by
    /// basis vectors (the common case), recorded in `degenerate`.
    echelon: Option<Echelon<F>>,
    degenerate: Vec<bool>,
    /// Level coordinate → position in the quotient basis.
    position: Vec<Option<usize>>,
    complement: Vec<usize>,
}

impl<F: Field> DegenerateQuotient<F> {
    fn new(v: &SimplicialVectorSpace<F>, m: usize) -> Self {
        let dim = v.level_dims[m];
        let images: Vec<&SparseVec<F::Elem>> = if m == 0 {
            Vec::new()
        } else {
            v.degeneracies[m - 1].iter().flat_map(|s| s.columns()).collect()
        };
        let monomial = images.iter().all(|c| c.len() <= 1);
        let mut degenerate = vec![false; dim];
        let echelon = if monomial {
            for c in &images {
                if let Some((r, _)) = c.first() {
                    degenerate[*r] = true;
                }
            }
            None
        } else {
            let mut ech = Echelon::new(&v.field);
            for c in images {
                ech.insert(c.clone());
            }
            for p in ech.pivot_indices() {
                degenerate[p] = true;
            }
            Some(ech)
        };
        let mut position = vec![None; dim];
        let mut complement = Vec::new();
        for r in 0..dim {
            if !degenerate[r] {
                position[r] = Some(complement.len());
                complement.push(r);
            }
        }
        DegenerateQuotient { echelon, degenerate, position, complement }
    }

    /// Image of a level vector in the quotient basis.
    fn project(&self, v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        let v = match &self.echelon {
            Some(ech) => ech.reduce(v),
            None => v.into_iter().filter(|(r, _)| !self.degenerate[*r]).collect(),
        };
        v.into_iter().map(|(r, x)| (self.position[r].expect("reduced off the degenerate pivots"), x)).collect()
    }
}

/// The normalized chain complex `N_m = V_m / (degenerate subspace)` with
/// `∂ = Σ (-1)^i d_i`. The quotient is realized on the level basis vectors
/// that are not pivots of the degenerate subspace.
pub fn normalized_chains<F: Field>(v: &SimplicialVectorSpace<F>) -> Result<ChainComplex<F>> {
    let t = v.truncation();
    let quotients: Vec<DegenerateQuotient<F>> = (0..=t).map(|m| DegenerateQuotient::new(v, m)).collect();
    let dims: Vec<usize> = quotients.iter().map(|q| q.complement.len()).collect();
    let mut boundaries = Vec::with_capacity(t);
    for m in 1..=t {
        let cols = quotients[m]
            .complement
            .iter()
            .map(|&c| {
                let mut terms = Vec::new();
                for (i, d) in v.faces[m].iter().enumerate() {
                    let sign = v.field.sign(i);
                    for (r, x) in d.column(c) {
                        terms.push((*r, v.field.mul(&sign, x)));
                    }
                }
                quotients[m - 1].project(crate::matrix::normalize(&v.field, terms))
            })
            .collect();
        boundaries.push(Matrix::from_columns(&v.field, dims[m - 1], cols)?);
    }
    ChainComplex::new(&v.field, dims, boundaries).map_err(|e| match e {
        Error::NotAComplex { degree } => {
            Error::SimplicialIdentity(format!("normalized differential squares to nonzero in degree {degree}"))
        }
        other => other,
    })
}

/// Coordinates of a level-`m` vector in the basis of `N_m` used by [`normalized_chains`].
pub fn normalized_projection<F: Field>(v: &SimplicialVectorSpace<F>, m: usize, x: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
    DegenerateQuotient::new(v, m).project(x)
}

/// The unnormalized (Moore) complex on the full levels.
pub fn unnormalized_chains<F: Field>(v: &SimplicialVectorSpace<F>) -> Result<ChainComplex<F>> {
    let t = v.truncation();
    let boundaries = (1..=t).map(|m| v.alternating_face_sum(m)).collect();
    ChainComplex::new(&v.field, v.level_dims.clone(), boundaries).map_err(|e| match e {
        Error::NotAComplex { degree } => {
            Error::SimplicialIdentity(format!("alternating face sum squares to nonzero in degree {degree}"))
        }
        other => other,
    })
}

/// `dim π_s V` for `s = 0..T` (the certified range `0..=T-1`).
pub fn homotopy_dims<F: Field>(v: &SimplicialVectorSpace<F>) -> Result<GradedDims> {
    let h = normalized_chains(v)?.homology_dims();
    Ok(h.truncated(v.truncation()))
}

/// Same range as [`homotopy_dims`], computed from the unnormalized complex.
pub fn homotopy_dims_unnormalized<F: Field>(v: &SimplicialVectorSpace<F>) -> Result<GradedDims> {
    let h = unnormalized_chains(v)?.homology_dims();
    Ok(h.truncated(v.truncation()))
}

/// The Dold–Kan inverse `Γ(C)`, truncated at level `t`.
///
/// Level `m` has basis `(k, c, σ)` for `σ: [m] ↠ [k]` and `c` a basis vector
/// of `C_k`, ordered by `k`, then `c`, then the mask of `σ`. Degrees of `C`
/// above its top are zero.
pub fn dold_kan_inverse<F: Field>(c: &ChainComplex<F>, t: usize) -> Result<SimplicialVectorSpace<F>> {
    if t > surjection::MAX_LEVEL {
        return Err(Error::Bounds(format!("truncation {t} exceeds {}", surjection::MAX_LEVEL)));
    }
    let field = c.field.clone();
    let top = c.top_degree();
    // basis[m]: list of (k, c, mask); index lookup by (k, c, mask)
    let mut basis: Vec<Vec<(usize, usize, u64)>> = Vec::with_capacity(t + 1);
    let mut index: Vec<rustc_hash::FxHashMap<(usize, usize, u64), usize>> = Vec::with_capacity(t + 1);
    for m in 0..=t {
        let mut b = Vec::new();
        for k in 0..=m.min(top) {
            for cidx in 0..c.dim(k) {
                for mask in surjection::masks(m, k) {
                    b.push((k, cidx, mask));
                }
            }
        }
        index.push(b.iter().enumerate().map(|(i, key)| (*key, i)).collect());
        basis.push(b);
    }
    let mut faces = Vec::with_capacity(t);
    for m in 1..=t {
        let mut list = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let cols = basis[m]
                .iter()
                .map(|&(k, cidx, mask)| match surjection::face(mask, m, i) {
                    Face::Surjective(nm) => vec![(index[m - 1][&(k, cidx, nm)], field.one())],
                    Face::Boundary(tau) => c.boundary(k)
                        .column(cidx)
                        .iter()
                        .map(|(r, x)| (index[m - 1][&(k - 1, *r, tau)], x.clone()))
                        .collect(),
                    Face::Zero => Vec::new(),
                })
                .collect();
            list.push(Matrix::from_columns(&field, basis[m - 1].len(), cols)?);
        }
        faces.push(list);
    }
    let mut degeneracies = Vec::with_capacity(t);
    for m in 0..t {
        let list = (0..=m)
            .map(|j| {
                let cols = basis[m]
                    .iter()
                    .map(|&(k, cidx, mask)| vec![(index[m + 1][&(k, cidx, surjection::degeneracy(mask, j))], field.one())])
                    .collect();
                Matrix::from_columns(&field, basis[m + 1].len(), cols)
            })
            .collect::<Result<Vec<_>>>()?;
        degeneracies.push(list);
    }
    let dims = basis.iter().map(Vec::len).collect();
    SimplicialVectorSpace::from_parts(&field, dims, faces, degeneracies)
}

/// The chain complex with `V = ℓ^q` in degree `n` and zero elsewhere, through degree `top`.
pub fn concentrated_complex<F: Field>(field: &F, q: usize, n: usize, top: usize) -> ChainComplex<F> {
    let dims: Vec<usize> = (0..=top).map(|k| if k == n { q } else { 0 }).collect();
    let boundaries = (1..=top).map(|m| Matrix::zeros(field, dims[m - 1], dims[m])).collect();
    ChainComplex::new(field, dims, boundaries).expect("zero differentials")
}

/// `K(V, n)` for `V = ℓ^q`, levels `0..=t`: level `m` has basis
/// `(v, σ)` with `σ: [m] ↠ [n]`, so dimension `C(m, n) · q`.
pub fn eilenberg_maclane<F: Field>(field: &F, q: usize, n: usize, t: usize) -> Result<SimplicialVectorSpace<F>> {
    if t < n {
        return Err(Error::Bounds(format!("truncation {t} is below the degree {n}")));
    }
    dold_kan_inverse(&concentrated_complex(field, q, n, n), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn constant_object_homotopy() {
        let f2 = PrimeField::new(2).unwrap();
        let c = SimplicialVectorSpace::constant(&f2, 4);
        c.validate().unwrap();
        let n = normalized_chains(&c).unwrap();
        assert_eq!(n.dims().0, vec![1, 0, 0, 0, 0]);
        assert_eq!(homotopy_dims_unnormalized(&c).unwrap().0, vec![1, 0, 0, 0]);
        assert_eq!(homotopy_dims(&SimplicialVectorSpace::<PrimeField>::zero(&f2, 3)).unwrap().0, vec![0, 0, 0]);
    }

    #[test]
    fn em_level_dims_and_homotopy() {
        let f2 = PrimeField::new(2).unwrap();
        let k = eilenberg_maclane(&f2, 1, 1, 4).unwrap();
        k.validate().unwrap();
        assert_eq!(k.level_dims(), &[0, 1, 2, 3, 4]);
        assert_eq!(normalized_chains(&k).unwrap().dims().0, vec![0, 1, 0, 0, 0]);
        let q = Rationals;
        let k2 = eilenberg_maclane(&q, 1, 2, 4).unwrap();
        assert_eq!(k2.level_dims(), &[0, 0, 1, 3, 6]);
        let k25 = eilenberg_maclane(&q, 1, 2, 5).unwrap();
        assert_eq!(homotopy_dims(&k25).unwrap().0, vec![0, 0, 1, 0, 0]);
        assert_eq!(homotopy_dims_unnormalized(&k25).unwrap().0, vec![0, 0, 1, 0, 0]);
        assert!(matches!(eilenberg_maclane(&q, 1, 3, 2), Err(Error::Bounds(_))));
    }

    #[test]
    fn sum_and_tensor() {
        let q = Rationals;
        let t = 5;
        let a = eilenberg_maclane(&q, 1, 1, t).unwrap();
        let b = eilenberg_maclane(&q, 1, 3, t).unwrap();
        let s = a.direct_sum(&b).unwrap();
        s.validate().unwrap();
        assert_eq!(homotopy_dims(&s).unwrap().0, vec![0, 1, 0, 1, 0]);
        let tt = a.tensor(&a).unwrap();
        tt.validate().unwrap();
        assert_eq!(tt.level_dims(), &[0, 1, 4, 9, 16, 25]);
        assert_eq!(homotopy_dims(&tt).unwrap().0, vec![0, 0, 1, 0, 0]);
        let unit = a.tensor(&SimplicialVectorSpace::constant(&q, t)).unwrap();
        assert_eq!(homotopy_dims(&unit).unwrap(), homotopy_dims(&a).unwrap());
        let f2 = PrimeField::new(2).unwrap();
        let other = SimplicialVectorSpace::constant(&f2, t);
        assert!(eilenberg_maclane(&f2, 1, 1, 4).unwrap().tensor(&other).is_err());
    }

    #[test]
    fn broken_identity_is_detected() {
        let q = Rationals;
        let k = eilenberg_maclane(&q, 1, 1, 3).unwrap();
        let mut faces: Vec<Vec<Matrix<Rationals>>> = (1..=3).map(|m| (0..=m).map(|i| k.face(m, i).clone()).collect()).collect();
        let degs: Vec<Vec<Matrix<Rationals>>> = (0..3).map(|m| (0..=m).map(|j| k.degeneracy(m, j).clone()).collect()).collect();
        faces[1][0] = faces[1][0].scaled(&q.from_i64(2));
        let r = SimplicialVectorSpace::new(&q, k.level_dims().to_vec(), faces, degs);
        assert!(matches!(r, Err(Error::SimplicialIdentity(_))));
    }

    #[test]
    fn json_round_trip() {
        let f3 = PrimeField::new(3).unwrap();
        let k = eilenberg_maclane(&f3, 2, 1, 3).unwrap();
        let j = k.to_json();
        let back = SimplicialVectorSpace::from_json(&f3, &j).unwrap();
        assert_eq!(back, k);
        let f2 = PrimeField::new(2).unwrap();
        assert!(matches!(
            SimplicialVectorSpace::from_json(&f2, &j),
            Err(Error::CharacteristicMismatch { .. })
        ));
    }

    #[test]
    fn acyclic_summand_is_invisible() {
        // K(ℓ,1) ⊕ Γ(ℓ --id--> ℓ in degrees 2,1)
        let q = Rationals;
        let cone = ChainComplex::new(
            &q,
            vec![0, 1, 1],
            vec![Matrix::zeros(&q, 0, 1), Matrix::identity(&q, 1)],
        )
        .unwrap();
        let g = dold_kan_inverse(&cone, 5).unwrap();
        g.validate().unwrap();
        assert_eq!(homotopy_dims(&g).unwrap().0, vec![0; 5]);
        let k = eilenberg_maclane(&q, 1, 1, 5).unwrap();
        let s = k.direct_sum(&g).unwrap();
        assert_eq!(homotopy_dims(&s).unwrap(), homotopy_dims(&k).unwrap());
        assert_eq!(homotopy_dims_unnormalized(&s).unwrap(), homotopy_dims(&k).unwrap());
    }
}
