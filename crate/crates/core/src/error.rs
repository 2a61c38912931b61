use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("form degree {k} out of range for dimension {n}")]
    DegreeOutOfRange { k: i64, n: usize },
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("matrix is singular")]
    Singular,
    #[error("form lies outside the space: {0}")]
    NotInSpace(String),
    #[error("unsupported size: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("direct-sum condition fails: {0}")]
    NotDirectSum(String),
    #[error("geometric decomposition map is not bijective")]
    NotBijective,
    #[error("exceptional case: {0}")]
    Exceptional(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
