//! Sparse matrices over a [`Field`] and deterministic exact elimination.
//!
//! Matrices are stored column-major with sorted sparse columns and no
//! explicit zeros. All elimination routines insert vectors in a fixed order
//! and pivot on the smallest nonzero row index, so results depend only on
//! the input.

use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::field::Field;

/// Sparse vector: `(index, value)` pairs sorted by index, no zero values.
pub type SparseVec<E> = Vec<(usize, E)>;

/// `v - a * w`
pub fn axpy<F: Field>(field: &F, v: &[(usize, F::Elem)], a: &F::Elem, w: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        if j == w.len() || (i < v.len() && v[i].0 < w[j].0) {
            out.push(v[i].clone());
            i += 1;
        } else if i == v.len() || w[j].0 < v[i].0 {
            out.push((w[j].0, field.neg(&field.mul(a, &w[j].1))));
            j += 1;
        } else {
            let x = field.sub(&v[i].1, &field.mul(a, &w[j].1));
            if !field.is_zero(&x) {
                out.push((v[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale<F: Field>(field: &F, a: &F::Elem, v: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
    if field.is_zero(a) {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, field.mul(a, x))).collect()
}

/// Sorts and merges an unordered list of terms.
pub fn normalize<F: Field>(field: &F, mut terms: Vec<(usize, F::Elem)>) -> SparseVec<F::Elem> {
    terms.sort_by_key(|t| t.0);
    let mut out: SparseVec<F::Elem> = Vec::with_capacity(terms.len());
    for (i, x) in terms {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y = field.add(y, &x),
            _ => out.push((i, x)),
        }
    }
    out.retain(|(_, x)| !field.is_zero(x));
    out
}

#[derive(Clone)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> PartialEq for Matrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field.spec() == other.field.spec() && self.rows == other.rows && self.cols == other.cols
    }
}

impl<F: Field> Eq for Matrix<F> {}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols.len(), self.field.spec())?;
        if self.rows * self.cols.len() <= 400 {
            for r in 0..self.rows {
                let row: Vec<String> = (0..self.cols.len())
                    .map(|c| format!("{:?}", self.get(r, c)))
                    .collect();
                writeln!(f, "  [{}]", row.join(", "))?;
            }
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols: vec![Vec::new(); cols] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let cols = (0..n).map(|i| vec![(i, field.one())]).collect();
        Matrix { field: field.clone(), rows: n, cols }
    }

    /// Builds from sparse columns, sorting and dropping zeros.
    pub fn from_columns(field: &F, rows: usize, cols: Vec<SparseVec<F::Elem>>) -> Result<Self> {
        let mut out = Vec::with_capacity(cols.len());
        for (c, col) in cols.into_iter().enumerate() {
            let col = normalize(field, col);
            if let Some((r, _)) = col.last() {
                if *r >= rows {
                    return Err(Error::Dimension(format!("row index {r} out of range in column {c} of a {rows}-row matrix")));
                }
            }
            out.push(col);
        }
        Ok(Matrix { field: field.clone(), rows, cols: out })
    }

    /// Trusted constructor: columns already sorted, zero-free and in range.
    pub(crate) fn from_sorted_columns(field: &F, rows: usize, cols: Vec<SparseVec<F::Elem>>) -> Self {
        debug_assert!(cols.iter().all(|c| c.windows(2).all(|w| w[0].0 < w[1].0)));
        debug_assert!(cols.iter().all(|c| c.iter().all(|(r, x)| *r < rows && !field.is_zero(x))));
        Matrix { field: field.clone(), rows, cols }
    }

    /// Row-major dense integer data, reduced into the field.
    pub fn from_rows_i64(field: &F, rows: &[Vec<i64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let mut cols = vec![Vec::new(); ncols];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let x = field.from_i64(v);
                if !field.is_zero(&x) {
                    cols[c].push((r, x));
                }
            }
        }
        Ok(Matrix { field: field.clone(), rows: rows.len(), cols })
    }

    /// Row-major dense data of field elements.
    pub fn from_rows(field: &F, nrows: usize, ncols: usize, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension(format!("expected {nrows}x{ncols} data")));
        }
        let mut cols = vec![Vec::new(); ncols];
        for (r, row) in rows.into_iter().enumerate() {
            for (c, x) in row.into_iter().enumerate() {
                if !field.is_zero(&x) {
                    cols[c].push((r, x));
                }
            }
        }
        Ok(Matrix { field: field.clone(), rows: nrows, cols })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, c: usize) -> &[(usize, F::Elem)] {
        &self.cols[c]
    }

    pub fn columns(&self) -> &[SparseVec<F::Elem>] {
        &self.cols
    }

    pub fn into_columns(self) -> Vec<SparseVec<F::Elem>> {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> F::Elem {
        match self.cols[c].binary_search_by_key(&r, |t| t.0) {
            Ok(i) => self.cols[c][i].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<F::Elem>> {
        let mut out = vec![vec![self.field.zero(); self.cols.len()]; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, x) in col {
                out[*r][c] = x.clone();
            }
        }
        out
    }

    /// Every entry a canonical element of `field`.
    pub fn check_entries(&self, field: &F) -> Result<()> {
        if self.field.spec() != field.spec() {
            return Err(Error::CharacteristicMismatch { expected: field.spec(), found: self.field.spec() });
        }
        for (c, col) in self.cols.iter().enumerate() {
            for (r, x) in col {
                if !field.contains(x) {
                    return Err(Error::NonCanonicalEntry { row: *r, col: c, field: field.spec() });
                }
            }
        }
        Ok(())
    }

    /// `self * v`
    pub fn apply(&self, v: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
        let mut acc: FxHashMap<usize, F::Elem> = FxHashMap::default();
        for (c, x) in v {
            for (r, y) in &self.cols[*c] {
                let e = acc.entry(*r).or_insert_with(|| self.field.zero());
                self.field.add_mul_assign(e, x, y);
            }
        }
        let mut out: SparseVec<F::Elem> = acc.into_iter().filter(|(_, x)| !self.field.is_zero(x)).collect();
        out.sort_by_key(|t| t.0);
        out
    }

    /// `self * other`
    pub fn mul(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        if self.cols() != other.rows {
            return Err(Error::Dimension(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        let cols = other.cols.iter().map(|c| self.apply(c)).collect();
        Ok(Matrix { field: self.field.clone(), rows: self.rows, cols })
    }

    pub fn add(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        self.combine(other, &self.field.one())
    }

    pub fn sub(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        self.combine(other, &self.field.neg(&self.field.one()))
    }

    /// `self + a * other`
    pub fn combine(&self, other: &Matrix<F>, a: &F::Elem) -> Result<Matrix<F>> {
        if self.rows != other.rows || self.cols() != other.cols() {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        let minus_a = self.field.neg(a);
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(x, y)| axpy(&self.field, x, &minus_a, y))
            .collect();
        Ok(Matrix { field: self.field.clone(), rows: self.rows, cols })
    }

    pub fn scaled(&self, a: &F::Elem) -> Matrix<F> {
        let cols = self.cols.iter().map(|c| scale(&self.field, a, c)).collect();
        Matrix { field: self.field.clone(), rows: self.rows, cols }
    }

    pub fn transpose(&self) -> Matrix<F> {
        let mut cols = vec![Vec::new(); self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, x) in col {
                cols[*r].push((c, x.clone()));
            }
        }
        Matrix { field: self.field.clone(), rows: self.cols(), cols }
    }

    /// Kronecker product; basis of the result is `(i, j) -> i * other_dim + j`.
    pub fn kron(&self, other: &Matrix<F>) -> Matrix<F> {
        let rows = self.rows * other.rows;
        let mut cols = Vec::with_capacity(self.cols() * other.cols());
        for a in &self.cols {
            for b in &other.cols {
                let mut col = Vec::with_capacity(a.len() * b.len());
                for (i, x) in a {
                    for (j, y) in b {
                        col.push((i * other.rows + j, self.field.mul(x, y)));
                    }
                }
                cols.push(col);
            }
        }
        Matrix { field: self.field.clone(), rows, cols }
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Matrix<F>) -> Matrix<F> {
        let mut cols = self.cols.clone();
        for col in &other.cols {
            cols.push(col.iter().map(|(r, x)| (r + self.rows, x.clone())).collect());
        }
        Matrix { field: self.field.clone(), rows: self.rows + other.rows, cols }
    }

    /// Vertical concatenation `[self; other]`.
    pub fn stack(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        if self.cols() != other.cols() {
            return Err(Error::Dimension("stacking matrices with different column counts".into()));
        }
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.extend(b.iter().map(|(r, x)| (r + self.rows, x.clone())));
                c
            })
            .collect();
        Ok(Matrix { field: self.field.clone(), rows: self.rows + other.rows, cols })
    }

    /// Rows reindexed by `perm[old] = new`, columns by `col_perm[old] = new`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Matrix<F> {
        let mut cols = vec![Vec::new(); self.cols()];
        for (c, col) in self.cols.iter().enumerate() {
            let mut v: SparseVec<F::Elem> = col.iter().map(|(r, x)| (row_perm[*r], x.clone())).collect();
            v.sort_by_key(|t| t.0);
            cols[col_perm[c]] = v;
        }
        Matrix { field: self.field.clone(), rows: self.rows, cols }
    }

    /// Nested row-major JSON array.
    pub fn to_json(&self) -> serde_json::Value {
        let dense = self.to_dense();
        serde_json::Value::Array(
            dense
                .iter()
                .map(|row| serde_json::Value::Array(row.iter().map(|x| self.field.to_json(x)).collect()))
                .collect(),
        )
    }

    /// Parses a nested row-major array of the given shape.
    pub fn from_json(field: &F, rows: usize, cols: usize, v: &serde_json::Value) -> Result<Matrix<F>> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
        if arr.len() != rows {
            return Err(Error::Dimension(format!("expected {rows} rows, found {}", arr.len())));
        }
        let mut data = Vec::with_capacity(rows);
        for row in arr {
            let row = row.as_array().ok_or_else(|| Error::Parse("matrix row must be an array".into()))?;
            if row.len() != cols {
                return Err(Error::Dimension(format!("expected {cols} columns, found {}", row.len())));
            }
            data.push(row.iter().map(|x| field.from_json(x)).collect::<Result<Vec<_>>>()?);
        }
        Matrix::from_rows(field, rows, cols, data)
    }
}

/// Incremental echelon basis of a subspace.
///
/// Each stored pivot vector has leading coefficient one at its pivot index.
/// With tracking enabled every pivot also records which combination of the
/// inserted vectors produced it, so membership queries can return
/// coordinates.
pub struct Echelon<F: Field> {
    field: F,
    pivots: FxHashMap<usize, Pivot<F::Elem>>,
    track: bool,
    inserted: usize,
}

struct Pivot<E> {
    vec: SparseVec<E>,
    combo: SparseVec<E>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: &F) -> Self {
        Echelon { field: field.clone(), pivots: FxHashMap::default(), track: false, inserted: 0 }
    }

    pub fn tracking(field: &F) -> Self {
        Echelon { track: true, ..Echelon::new(field) }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Pivot indices in increasing order.
    pub fn pivot_indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pivots.keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// Clears entries that have a pivot, scanning upwards. With `full` off
    /// it stops at the first entry without a pivot, which already decides
    /// independence.
    fn reduce_inner(
        &self,
        mut v: SparseVec<F::Elem>,
        mut combo: SparseVec<F::Elem>,
        full: bool,
    ) -> (SparseVec<F::Elem>, SparseVec<F::Elem>) {
        let mut start = 0;
        while start < v.len() {
            let (lead, coeff) = (v[start].0, v[start].1.clone());
            match self.pivots.get(&lead) {
                Some(p) => {
                    let tail = axpy(&self.field, &v[start..], &coeff, &p.vec);
                    v.truncate(start);
                    v.extend(tail);
                    if self.track {
                        combo = axpy(&self.field, &combo, &coeff, &p.combo);
                    }
                }
                None if full => start += 1,
                None => break,
            }
        }
        (v, combo)
    }

    /// Fully reduces `v` against the stored pivots.
    pub fn reduce(&self, v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        self.reduce_inner(v, Vec::new(), true).0
    }

    /// Inserts `v`; returns whether it was independent of the current span.
    /// With tracking, `v` is labelled by its insertion number.
    pub fn insert(&mut self, v: SparseVec<F::Elem>) -> bool {
        let label = self.inserted;
        self.inserted += 1;
        let combo = if self.track { vec![(label, self.field.one())] } else { Vec::new() };
        self.insert_with_combo(v, combo).is_none()
    }

    /// Inserts `v`. If `v` is dependent, returns the relation: a combination
    /// of inserted labels equal to zero (tracking only; empty otherwise).
    pub fn insert_relation(&mut self, v: SparseVec<F::Elem>) -> Option<SparseVec<F::Elem>> {
        let label = self.inserted;
        self.inserted += 1;
        let combo = if self.track { vec![(label, self.field.one())] } else { Vec::new() };
        self.insert_with_combo(v, combo)
    }

    fn insert_with_combo(&mut self, v: SparseVec<F::Elem>, combo: SparseVec<F::Elem>) -> Option<SparseVec<F::Elem>> {
        let (v, combo) = self.reduce_inner(v, combo, false);
        let Some((lead, coeff)) = v.first().cloned() else {
            return Some(combo);
        };
        let inv = self.field.inv(&coeff).expect("nonzero leading coefficient");
        let mut vec = scale(&self.field, &inv, &v);
        let combo = if self.track { scale(&self.field, &inv, &combo) } else { Vec::new() };
        vec.shrink_to_fit();
        self.pivots.insert(lead, Pivot { vec, combo });
        None
    }

    /// If `v` lies in the span, the coefficients expressing it in the
    /// inserted vectors (tracking only).
    pub fn express(&self, v: SparseVec<F::Elem>) -> Option<SparseVec<F::Elem>> {
        let (rem, combo) = self.reduce_inner(v, Vec::new(), true);
        if rem.is_empty() {
            // reduction subtracted the pivots, so the combination is negated
            Some(combo.iter().map(|(i, x)| (*i, self.field.neg(x))).collect())
        } else {
            None
        }
    }

    pub fn contains(&self, v: SparseVec<F::Elem>) -> bool {
        self.reduce(v).is_empty()
    }
}

fn check_field<F: Field>(m: &Matrix<F>, field: &F) -> Result<()> {
    if m.field.spec() != field.spec() {
        return Err(Error::CharacteristicMismatch { expected: field.spec(), found: m.field.spec() });
    }
    Ok(())
}

/// Rank over `field`. Columns are inserted sparsest first, ties by index.
pub fn rank<F: Field>(m: &Matrix<F>, field: &F) -> Result<usize> {
    check_field(m, field)?;
    Ok(rank_unchecked(m))
}

pub(crate) fn rank_unchecked<F: Field>(m: &Matrix<F>) -> usize {
    let mut order: Vec<usize> = (0..m.cols()).collect();
    order.sort_by_key(|&c| (m.cols[c].len(), c));
    let mut ech = Echelon::new(&m.field);
    for c in order {
        if ech.rank() == m.rows {
            break;
        }
        if !m.cols[c].is_empty() {
            ech.insert(m.cols[c].clone());
        }
    }
    ech.rank()
}

/// Basis of the kernel as the columns of a `cols x (cols - rank)` matrix.
///
/// Columns are processed in index order; each kernel vector has coefficient
/// one on its own column and otherwise involves only earlier columns.
pub fn kernel_basis<F: Field>(m: &Matrix<F>, field: &F) -> Result<Matrix<F>> {
    check_field(m, field)?;
    let mut ech = Echelon::tracking(field);
    let mut kernel = Vec::new();
    for col in &m.cols {
        if let Some(rel) = ech.insert_relation(col.clone()) {
            kernel.push(rel);
        }
    }
    Ok(Matrix::from_sorted_columns(field, m.cols(), kernel))
}

/// `dim ker(d_out) - rank(d_in)` for `C_{s+1} --d_in--> C_s --d_out--> C_{s-1}`.
pub fn homology_dim<F: Field>(d_in: &Matrix<F>, d_out: &Matrix<F>, field: &F) -> Result<usize> {
    check_field(d_in, field)?;
    check_field(d_out, field)?;
    if d_in.rows() != d_out.cols() {
        return Err(Error::Dimension(format!(
            "incoming map has {} rows but outgoing map has {} columns",
            d_in.rows(),
            d_out.cols()
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(Error::NotAComplex { degree: 0 });
    }
    let nullity = d_out.cols() - rank_unchecked(d_out);
    Ok(nullity - rank_unchecked(d_in))
}

/// Solves `a x = b`; `None` if `b` is outside the column space.
pub fn solve<F: Field>(a: &Matrix<F>, b: &[(usize, F::Elem)]) -> Option<SparseVec<F::Elem>> {
    let mut ech = Echelon::tracking(&a.field);
    for col in &a.cols {
        ech.insert(col.clone());
    }
    ech.express(b.to_vec())
}

/// Chosen homology representatives in one degree, with coordinates of
/// arbitrary cycles modulo boundaries.
pub struct HomologyBasis<F: Field> {
    field: F,
    reps: Vec<SparseVec<F::Elem>>,
    boundary_count: usize,
    ech: Echelon<F>,
}

impl<F: Field> HomologyBasis<F> {
    /// `d_in: C_{s+1} -> C_s`, `d_out: C_s -> C_{s-1}`.
    pub fn new(d_in: &Matrix<F>, d_out: &Matrix<F>) -> Result<Self> {
        let field = d_in.field.clone();
        if d_in.rows() != d_out.cols() {
            return Err(Error::Dimension("incoming and outgoing differentials do not compose".into()));
        }
        if !d_out.mul(d_in)?.is_zero() {
            return Err(Error::NotAComplex { degree: 0 });
        }
        let cycles = kernel_basis(d_out, &field)?;
        let mut ech = Echelon::tracking(&field);
        let mut boundary_count = 0;
        for col in &d_in.cols {
            ech.insert(col.clone());
            boundary_count += 1;
        }
        let mut reps = Vec::new();
        for z in cycles.cols {
            if ech.insert(z.clone()) {
                reps.push(z);
            } else {
                // Dependent insertions still consume a label; keep labels
                // aligned by recording an empty representative slot.
                reps.push(Vec::new());
            }
        }
        Ok(HomologyBasis { field, reps, boundary_count, ech })
    }

    pub fn dim(&self) -> usize {
        self.reps.iter().filter(|r| !r.is_empty()).count()
    }

    /// Cycle representatives of a basis of homology.
    pub fn representatives(&self) -> Vec<SparseVec<F::Elem>> {
        self.reps.iter().filter(|r| !r.is_empty()).cloned().collect()
    }

    /// Coordinates of the class of cycle `z` in the representative basis;
    /// `None` if `z` is not a cycle.
    pub fn coordinates(&self, z: &[(usize, F::Elem)]) -> Option<Vec<F::Elem>> {
        let combo = self.ech.express(z.to_vec())?;
        let mut slot_of = Vec::with_capacity(self.reps.len());
        let mut k = 0;
        for r in &self.reps {
            if r.is_empty() {
                slot_of.push(None);
            } else {
                slot_of.push(Some(k));
                k += 1;
            }
        }
        let mut out = vec![self.field.zero(); k];
        for (label, x) in combo {
            if label >= self.boundary_count {
                if let Some(slot) = slot_of[label - self.boundary_count] {
                    out[slot] = x;
                }
            }
        }
        Some(out)
    }
}
