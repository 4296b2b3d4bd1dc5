use thiserror::Error;

/// Errors raised by the certified computations.
///
/// Hypothesis gates that fail are not errors; they are reported through
/// verdicts. These variants cover malformed input and broken preconditions.
#[derive(Debug, Error)]
pub enum GapError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subspaces live in different spaces")]
    SpaceMismatch,
    #[error("basis is rank deficient: rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("containment fails: {0}")]
    NotContained(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("hypothesis gate failed: {0}")]
    Gate(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("path error at t = {t}: {msg}")]
    Path { t: f64, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GapError>;
