use thiserror::Error;

/// Errors produced by the algebra, series and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("algebra mismatch: operands live in R(0,{}) and R(0,{})", 2 * .left + 1, 2 * .right + 1)]
    SignatureMismatch { left: usize, right: usize },

    #[error("unsupported algebra size m = {0} (dense storage supports m <= 2)")]
    UnsupportedAlgebra(usize),

    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("paravector is not invertible (zero or null)")]
    NotInvertible,

    #[error("pole at {point:?}: {detail}")]
    Pole { point: Vec<f64>, detail: String },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
