use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} samples, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("non-finite input value at index {0}")]
    NonFinite(usize),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "aliasing guard violated: product extent {extent} does not fit below Nyquist index {limit}"
    )]
    Aliasing { extent: usize, limit: usize },

    #[error("guard-band violation: {0}")]
    GuardBand(String),

    #[error("dyadic window too small: {0}")]
    WindowTooSmall(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error("insufficient points for decay fit: need at least {need}, got {got}")]
    InsufficientPoints { need: usize, got: usize },

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error("fixed-point iteration diverged after {0} iterations")]
    Divergence(usize),

    #[error("fixed-point iteration did not reach tolerance within {max_iter} iterations (residual {residual:e})")]
    MaxIterations { max_iter: usize, residual: f64 },

    #[error("resource budget exceeded: need ~{need} bytes, budget {budget}")]
    Budget { need: u64, budget: u64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
