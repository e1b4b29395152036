use thiserror::Error;

/// Errors shared across the algebra modules.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("exact division failed: {0}")]
    NotDivisible(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("expression is not subtraction-free: {0}")]
    NotSubtractionFree(String),
    #[error("variable registries differ")]
    RegistryMismatch,
    #[error("cannot mutate at frozen vertex {0}")]
    FrozenVertex(String),
    #[error("vertex not found: {0}")]
    UnknownVertex(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix inversion hit a singular specialization")]
    SingularInversion,
    #[error("retries exhausted: {0}")]
    ExhaustedRetries(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
