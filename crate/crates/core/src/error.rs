use thiserror::Error;

pub type Result<T> = std::result::Result<T, RadlabError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadlabError {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds tolerance {tol:e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("eigenvalue iteration did not converge")]
    DidNotConverge,

    #[error("matrix is not positive semidefinite: eigenvalue {value:e} below threshold {threshold:e}")]
    NegativeEigenvalue { value: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {0} is outside the supported range 1..=64")]
    DimensionOutOfRange(usize),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("vector is not a unit vector: norm {0}")]
    UnitViolation(f64),

    #[error("real input required but an imaginary part is nonzero")]
    ComplexInput,

    #[error("operator is not invertible: min singular value {sigma_min:e}, threshold {threshold:e}")]
    NotInvertible { sigma_min: f64, threshold: f64 },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("unsupported dimension {0} for generator (expected 2..=64)")]
    UnsupportedDim(usize),

    #[error("no certified operands within a budget of {budget} candidates (best m = {best_m})")]
    NoHitsInBudget { budget: usize, best_m: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for RadlabError {
    fn from(e: std::io::Error) -> Self {
        RadlabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for RadlabError {
    fn from(e: serde_json::Error) -> Self {
        RadlabError::Parse(e.to_string())
    }
}

impl From<csv::Error> for RadlabError {
    fn from(e: csv::Error) -> Self {
        RadlabError::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> RadlabError {
    RadlabError::Domain(msg.into())
}
