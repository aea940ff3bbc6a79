use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum JrcError {
    /// The scenario document does not match the expected schema.
    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },

    /// A parsed configuration (or derived request) violates an invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Fisher information matrix could not be inverted reliably.
    #[error("singular Fisher information matrix (condition number {condition:.3e})")]
    Singular { condition: f64 },

    /// A noise covariance failed its Cholesky factorisation.
    #[error("noise covariance `{0}` is not positive definite")]
    NotPositiveDefinite(&'static str),

    /// The dense Fisher path refuses problems above its size limit.
    #[error("dense Fisher assembly limited to L*N <= {limit}, got {size}; use the closed-form bounds")]
    DenseLimit { size: usize, limit: usize },

    /// Closed-form bounds undefined for this pulse geometry.
    #[error("degenerate pulse geometry: {0}")]
    DegenerateGeometry(String),

    #[error("I/O error on `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, JrcError>;
