use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("point outside chart neighborhood: {0}")]
    ChartDomain(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("admissibility violated: {violated}")]
    Admissibility { violated: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("ill-conditioned weighting: {0}")]
    Conditioning(String),

    #[error("power iteration did not converge after {iterations} steps (last estimate {last})")]
    Iteration { last: f64, iterations: usize },

    #[error("node count {nodes} exceeds dense-matrix cap {cap}")]
    MemoryGuard { nodes: usize, cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn admissibility(violated: impl Into<String>) -> Self {
        Error::Admissibility {
            violated: violated.into(),
        }
    }

    /// True for errors caused by the caller's parameters rather than the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidPoint(_)
                | Error::ChartDomain(_)
                | Error::Range(_)
                | Error::Admissibility { .. }
                | Error::Config(_)
                | Error::Unsupported(_)
                | Error::MemoryGuard { .. }
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
