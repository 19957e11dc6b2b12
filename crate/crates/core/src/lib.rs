//! Exact homotopy and André–Quillen homology computations for finite-type
//! simplicial commutative algebras over a field.

pub mod audit;
pub mod barcof;
pub mod error;
pub mod field;
pub mod matrix;
pub mod sample;
pub mod series;
pub mod simplicial;
pub mod surjection;
pub mod symalg;

pub use error::{Error, Result};
pub use field::{Field, FieldSpec, PrimeField, Rat, Rationals};
pub use matrix::{homology_dim, kernel_basis, rank, Matrix};
pub use simplicial::{
    eilenberg_maclane, homotopy_dims, normalized_chains, unnormalized_chains, ChainComplex, GradedDims,
    SimplicialVectorSpace,
};
pub use audit::{
    envelope_chain, rational_check, serre_audit, splitting_series, AuditMode, AuditOutcome, AuditParams, AuditVerdict,
    EnvelopeProfile, PiBound, RationalVerdict,
};
pub use barcof::{a_rs_tables, bar_diagonal, les_feasibility, representing_map, AlgebraMap, CofiberReport, LesVerdict};
pub use series::{asymptotic_check, phi_eval, sphere_series_char0, sphere_series_charp, TruncatedSeries};
pub use symalg::{sphere_homotopy, HomotopyReport, WeightGradedAlgebra};
