use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative exponent {exp} in an ordinary power series term")]
    NegativeExponent { exp: i64 },
    #[error("term of total degree {degree} exceeds truncation degree {trunc}")]
    DegreeExceedsTrunc { degree: u32, trunc: u32 },
    #[error("substitution map component {index} has a nonzero constant term")]
    NonzeroConstantTerm { index: usize },
    #[error("series has no multiplicative inverse (zero constant term)")]
    NotAUnit,
    #[error("variable index {index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("map is not in canonical form z - H: {0}")]
    NotCanonical(String),
    #[error("map is not homogeneous{}", match .0 { Some(d) => format!(" of degree {d}"), None => String::new() })]
    NotHomogeneous(Option<u32>),
    #[error("homogeneous degree must be at least 2, got {0}")]
    DegreeTooSmall(u32),
    #[error("expected {expected} arguments, got {got}")]
    WrongArgumentCount { expected: usize, got: usize },
    #[error("insufficient precision: need terms through degree {needed}, have {available}")]
    InsufficientPrecision { needed: u32, available: u32 },
    #[error("exponent {0:?} lies outside the computed Laurent window")]
    OutsideWindow(Vec<i64>),
    #[error("H_{index} is not divisible by z_{index}; use the Jacobi coefficient formula instead")]
    NotDivisible { index: usize },
    #[error("Jacobian matrix is not nilpotent through degree {0}")]
    NotNilpotent(u32),
    #[error("methods disagree: {0}")]
    Disagreement(String),
    #[error("{0}")]
    Invalid(String),
}
