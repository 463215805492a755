use thiserror::Error;

/// Errors raised across the library.
///
/// Variants are grouped by the CLI exit code they map to: malformed input
/// (2), violated mathematical preconditions (3), failed certificates (4).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix determinant is {0}, expected 1")]
    BadDeterminant(String),
    #[error("{0} is not squarefree")]
    NotSquarefree(String),
    #[error("modulus {0} does not fit the residue engine (max 2^64-1)")]
    ModulusTooLarge(String),
    #[error("element is not hyperbolic (|trace| = {0})")]
    NotHyperbolic(String),
    #[error("element is not absolutely primitive (unit exponent {0})")]
    NotAbsolutelyPrimitive(u64),
    #[error("element is torsion")]
    Torsion,
    #[error("conjugate is not integral: {0}")]
    NotIntegral(String),
    #[error("inputs are not coprime: gcd({0}, {1}) > 1")]
    NotCoprime(u64, u64),
    #[error("search cap exceeded: {0}")]
    CapExceeded(String),
    #[error("element has a rational eigenvalue (unipotent or Borel-conjugate input)")]
    Reducible,
    #[error("no admissible extraction: {0}")]
    Insufficient(String),
    #[error("number too large to factor: {0}")]
    FactorLimit(String),
    #[error("certificate failure: {0}")]
    Certificate(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::DimensionMismatch(..)
            | Error::BadDeterminant(_)
            | Error::NotSquarefree(_)
            | Error::Io(_) => 2,
            Error::Certificate(_) => 4,
            _ => 3,
        }
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

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
