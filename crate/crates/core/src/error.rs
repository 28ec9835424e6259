use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field size {0} is not prime")]
    NotPrime(u32),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("instance too large: {what} needs {predicted}, cap is {cap}")]
    InstanceTooLarge {
        what: &'static str,
        predicted: u128,
        cap: u128,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("subspace is not isotropic")]
    NotIsotropic,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
