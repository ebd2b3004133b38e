use thiserror::Error;

/// Errors produced by the curvature library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scalar product is degenerate: smallest |eigenvalue| {smallest:e} is below {threshold:e}")]
    DegenerateMetric { smallest: f64, threshold: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension {0} is too small, need n >= 3")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown space tag `{0}`")]
    UnknownSpace(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("tensor is not a generalized curvature tensor (residual {residual:e})")]
    NotGeneralizedCurvature { residual: f64 },

    #[error("tensor is not an algebraic curvature tensor (residual {residual:e})")]
    NotAlgebraic { residual: f64 },

    #[error("{which} form violates its symmetry requirement (residual {residual:e})")]
    FormSymmetryViolation { which: &'static str, residual: f64 },

    #[error("space {space} is zero-dimensional at n = {dim}")]
    EmptySpace { space: String, dim: usize },

    #[error("rank of {space} is inconclusive: singular value gap {gap:e} below 1e6")]
    InconclusiveRank { space: String, gap: f64 },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("metric is degenerate at the evaluation point (det = {det:e})")]
    DegenerateAtPoint { det: f64 },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("array length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("W-route and direct Einstein verdicts disagree (pi residual {projector:e}, direct residual {direct:e})")]
    VerdictMismatch { projector: f64, direct: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
