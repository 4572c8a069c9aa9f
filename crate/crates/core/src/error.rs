use thiserror::Error;

/// Errors raised anywhere in the CII pipeline.
#[derive(Debug, Error)]
pub enum CiiError {
    #[error("empty sample set")]
    EmptySamples,

    #[error("invalid step CDF: {0}")]
    InvalidCdf(String),

    #[error("invalid p-box: {0}")]
    InvalidPBox(String),

    #[error("improper CDF: {0}")]
    ImproperCdf(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate distance range")]
    DegenerateDistanceRange,

    #[error("degenerate response scale")]
    DegenerateResponseScale,

    #[error("linear program: {0}")]
    Lp(String),

    #[error("rank-deficient design matrix")]
    RankDeficient,

    #[error("no external prediction for row {0}")]
    MissingPrediction(usize),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CiiError>;
