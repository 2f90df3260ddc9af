use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too large (must be below 2^61)")]
    ModulusTooLarge(u64),
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("residue {value} out of range for modulus {modulus}")]
    ResidueOutOfRange { value: u64, modulus: u64 },
    #[error("division by zero in the field")]
    DivisionByZero,
    #[error("matrix is singular")]
    Singular,
    #[error("no non-singular matrix found after {0} attempts")]
    SamplingExhausted(usize),
    #[error("invalid key material: {0}")]
    InvalidKey(String),
    #[error("direct encoding requires p >= 257 (got {0})")]
    DirectModeTooSmall(u64),
    #[error("corrupt data: {0}")]
    Corrupt(String),
    #[error("truncated data: need {needed} symbols, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),
    #[error("unknown phase '{0}'")]
    UnknownPhase(String),
}

pub type Result<T> = std::result::Result<T, Error>;
