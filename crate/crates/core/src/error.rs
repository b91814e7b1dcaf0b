use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("ord2 is undefined at 0")]
    OrdOfZero,

    #[error("binomial index out of range: k = {k} > n = {n}")]
    BinomialRange { n: u64, k: u64 },

    #[error("permutation enumeration limited to n <= {max}, got n = {n}")]
    EnumerationBound { n: usize, max: usize },

    #[error("invalid rational literal {0:?}")]
    Parse(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("checkpoint mismatch: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
