use thiserror::Error;

use crate::field::FieldSpec;

#[derive(Debug, Error)]
pub enum Error {
    #[error("characteristic {0} is neither 0 nor a prime below 2^31")]
    InvalidCharacteristic(u64),

    #[error("characteristic mismatch: expected {expected}, found {found}")]
    CharacteristicMismatch { expected: FieldSpec, found: FieldSpec },

    #[error("matrix entry at ({row}, {col}) is not a canonical element of {field}")]
    NonCanonicalEntry { row: usize, col: usize, field: FieldSpec },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("composite of differentials is nonzero in degree {degree}")]
    NotAComplex { degree: usize },

    #[error("simplicial identity violated: {0}")]
    SimplicialIdentity(String),

    #[error("invalid bounds: {0}")]
    Bounds(String),

    #[error("not a cycle: {0}")]
    NotACycle(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("result mismatch: {0}")]
    Mismatch(String),

    #[error("insufficient truncation: {0}")]
    Truncation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
