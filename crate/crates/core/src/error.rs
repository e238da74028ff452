use thiserror::Error;

pub type Result<T> = std::result::Result<T, HamliftError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamliftError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("matrix is not symplectic (residual {residual:.3e} > tolerance {tolerance:.3e})")]
    NotSymplectic { residual: f64, tolerance: f64 },

    #[error("integration diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("grid cannot resolve the transform without aliasing: {0}")]
    Aliasing(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("method `{method}` cannot be used here: {reason}")]
    IncompatibleMethod { method: String, reason: String },

    #[error("inconsistent flow family: round-trip residual {residual:.3e} at t = {time}")]
    InconsistentFlow { residual: f64, time: f64 },

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for HamliftError {
    fn from(e: std::io::Error) -> Self {
        HamliftError::Io(e.to_string())
    }
}
