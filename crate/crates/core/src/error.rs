use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid fiber parameter `{field}`: {reason}")]
    InvalidFiber { field: &'static str, reason: String },

    #[error("fiber guides no modes (V = {v_number:.4} is below the first cutoff)")]
    NoGuidedModes { v_number: f64 },

    #[error("radial quadrature did not converge for LP{l},{m}: {points} points, relative change {change:.3e}")]
    QuadratureNotConverged { l: u32, m: u32, points: usize, change: f64 },

    #[error("field grid mismatch: expected {expected} samples, got {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("SVD did not converge within {iterations} iterations")]
    SvdNotConverged { iterations: usize },

    #[error("inverse of an all-zero matrix is undefined without regularization")]
    UndefinedInverse,

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("precoding normalization has zero trace")]
    ZeroTrace,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("noise level {requested} is not in the report (available: {available:?})")]
    NoiseLevelNotInReport { requested: f64, available: Vec<f64> },

    #[error("malformed report: {0}")]
    MalformedReport(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
