//! Random finite simplicial vector spaces with known homotopy.
//!
//! A chain complex is assembled from spheres and contractible pairs, mixed by
//! random basis changes, passed through the Dold–Kan inverse, and mixed again
//! levelwise. Its homotopy is the number of spheres in each degree.

use rand::Rng;

use crate::error::Result;
use crate::field::Field;
use crate::matrix::Matrix;
use crate::simplicial::{dold_kan_inverse, ChainComplex, GradedDims, SimplicialVectorSpace};

/// A random object together with its homotopy.
#[derive(Clone, Debug)]
pub struct RandomObject<F: Field> {
    pub complex: ChainComplex<F>,
    pub space: SimplicialVectorSpace<F>,
    /// Homotopy in degrees `0..=truncation`.
    pub expected: GradedDims,
}

/// A random invertible `n × n` matrix and its inverse, as a product of
/// elementary row operations with small integer multipliers.
pub fn random_invertible<F: Field, R: Rng>(field: &F, n: usize, rng: &mut R) -> Result<(Matrix<F>, Matrix<F>)> {
    let mut p: Vec<Vec<F::Elem>> = (0..n).map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect();
    let mut pinv = p.clone();
    if n > 1 {
        for _ in 0..2 * n {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            let a = field.from_i64(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
            // P ← E·P with E adding a·(row j) to row i; P⁻¹ ← P⁻¹·E⁻¹ subtracts a·(column i) from column j.
            let src = p[j].clone();
            for (x, y) in p[i].iter_mut().zip(&src) {
                *x = field.add(x, &field.mul(&a, y));
            }
            for row in pinv.iter_mut() {
                let t = field.mul(&a, &row[i]);
                row[j] = field.sub(&row[j], &t);
            }
        }
    }
    Ok((Matrix::from_rows(field, n, n, p)?, Matrix::from_rows(field, n, n, pinv)?))
}

/// A random object with chain degrees `0..=top` and levels `0..=t`.
pub fn random_object<F: Field, R: Rng>(field: &F, top: usize, t: usize, rng: &mut R) -> Result<RandomObject<F>> {
    let spheres: Vec<usize> = (0..=top).map(|_| rng.gen_range(0..=2)).collect();
    // pairs[k] joins degree k to degree k - 1
    let pairs: Vec<usize> = (0..=top).map(|k| if k == 0 { 0 } else { rng.gen_range(0..=2) }).collect();
    let up = |k: usize| if k < top { pairs[k + 1] } else { 0 };
    let dims: Vec<usize> = (0..=top).map(|k| spheres[k] + up(k) + pairs[k]).collect();
    let changes = dims.iter().map(|&d| random_invertible(field, d, rng)).collect::<Result<Vec<_>>>()?;
    let mut boundaries = Vec::with_capacity(top);
    for k in 1..=top {
        // sources sit after spheres and incoming targets; targets right after spheres
        let cols = (0..dims[k])
            .map(|c| {
                let first_source = spheres[k] + up(k);
                if c >= first_source {
                    vec![(spheres[k - 1] + (c - first_source), field.one())]
                } else {
                    Vec::new()
                }
            })
            .collect();
        let d = Matrix::from_columns(field, dims[k - 1], cols)?;
        boundaries.push(changes[k - 1].0.mul(&d)?.mul(&changes[k].1)?);
    }
    let complex = ChainComplex::new(field, dims, boundaries)?;
    let gamma = dold_kan_inverse(&complex, t)?;
    let level = (0..=t).map(|m| random_invertible(field, gamma.level_dim(m), rng)).collect::<Result<Vec<_>>>()?;
    let space = gamma.change_basis(&level)?;
    let expected = GradedDims((0..=t).map(|k| if k <= top { spheres[k] } else { 0 }).collect());
    Ok(RandomObject { complex, space, expected })
}
