use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("vector must have at least one entry")]
    EmptyVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("grid is empty")]
    EmptyGrid,
    #[error("no bracket: f({lo}) and f({hi}) have the same sign")]
    NoBracket { lo: f64, hi: f64 },
    #[error("t must be positive, got {0}")]
    NonPositiveT(f64),
    #[error("parameter order violated: {0}")]
    ParameterOrder(String),
    #[error("missing attestation: {0}")]
    MissingAttestation(String),
    #[error("no convergence after {0} iterations")]
    ConvergenceFailure(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("bound violated: {0}")]
    BoundViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
