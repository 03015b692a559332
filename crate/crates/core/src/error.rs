use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value violates a physical or structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// The input carries no information to work with (all-zero counts,
    /// zero denominators).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The measurement record does not determine the state.
    #[error("ill-posed reconstruction: {0}")]
    IllPosed(String),

    #[error("fit failed after {iterations} iterations: {reason}")]
    FitFailed {
        iterations: usize,
        reason: String,
        partial: Box<crate::detection::GaussianFit<f64>>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
