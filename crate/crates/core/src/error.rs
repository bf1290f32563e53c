use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("unsupported field size {p}^{m} (must be at most 2^32)")]
    UnsupportedField { p: u64, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vectors are linearly dependent")]
    LinearlyDependent,
    #[error("vectors do not span the space")]
    NotSpanning,
    #[error("matrix is full rank")]
    FullRank,
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("search space of {size} exceeds the limit {limit}")]
    GuardExceeded { size: f64, limit: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
