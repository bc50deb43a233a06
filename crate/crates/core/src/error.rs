use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite sample at flat index {index}")]
    NonFinite { index: usize },

    #[error("invalid resolution {resolution}: {reason}")]
    InvalidResolution { resolution: usize, reason: &'static str },

    #[error("resolution {resolution} cannot represent degree {degree} on axis {axis} without aliasing")]
    Aliasing { axis: usize, degree: usize, resolution: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("input has mean {mean:e}; the periodic Poisson problem needs zero mean")]
    NonZeroMean { mean: f64 },

    #[error("infeasible geometry: {0}")]
    Infeasible(String),

    #[error("approximation tolerance {sigma:e} not reached: best error {best_error:e} at degree parameter {max_degree} (resolution {resolution})")]
    ToleranceUnreachable { sigma: f64, best_error: f64, max_degree: usize, resolution: usize },

    #[error("criterion domain violated: {0}")]
    Domain(String),

    #[error("candidate graph cannot be evaluated: {0}")]
    NotEvaluable(String),

    #[error("empty function family")]
    EmptyFamily,

    #[error("malformed grid container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
