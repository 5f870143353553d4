use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty vector")]
    EmptyVector,
    #[error("invalid dimension {n}: need at least 2 entries")]
    InvalidDimension { n: usize },
    #[error("entry {index} is not strictly positive")]
    NonPositiveEntry { index: usize },
    #[error("entry {index} is negative")]
    NegativeEntry { index: usize },
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("weights sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("tangent vector is attached to a different base point")]
    BaseMismatch,
    #[error("vector is not tangent: residual {residual:e}")]
    NotTangent { residual: f64 },
    #[error("invalid cost spec: {0}")]
    InvalidSpec(String),
    #[error("operation not supported for {0} cost specs")]
    UnsupportedKind(&'static str),
    #[error("exponent q = {0} must lie in (1, inf)")]
    InvalidQ(f64),
    #[error("entry {index} is below the representable range for root transforms")]
    Underflow { index: usize },
    #[error("tolerances must be finite and strictly positive")]
    InvalidTolerance,
    #[error("path needs at least two points")]
    TooFewPoints,
    #[error("geodesic endpoints coincide")]
    IdenticalEndpoints,
    #[error("degenerate fitting window: {0}")]
    DegenerateWindow(&'static str),
    #[error("step too large: positivity lost at t = {t}")]
    StepTooLarge { t: f64 },
    #[error("positivity lost: weight {index} underflowed to zero")]
    PositivityLost { index: usize },
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("finite-difference derivative estimates disagree ({coarse:e} vs {fine:e})")]
    NumericalBreakdown { coarse: f64, fine: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Failures that come out of the numerics rather than from malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepTooLarge { .. }
                | Error::PositivityLost { .. }
                | Error::NumericalBreakdown { .. }
                | Error::Underflow { .. }
                | Error::DegenerateWindow(_)
        )
    }
}
