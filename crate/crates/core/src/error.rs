use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("axis {axis} out of range for a {dim}-dimensional torus")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("operator is not selfadjoint (deviation {0:e})")]
    NotSelfadjoint(f64),

    #[error("sector component of dimension {0} is too large for a dense eigensolve")]
    ComponentTooLarge(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed element file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
