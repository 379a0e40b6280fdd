use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FasError {
    /// Argument outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration (sizes, orders, ranks).
    #[error("configuration error: {0}")]
    Config(String),

    /// Iterative method failed to converge.
    #[error("numerical error: {message} (residual {residual:.3e})")]
    Numerical { message: String, residual: f64 },

    /// Matrix is not positive definite even after the full jitter ladder.
    #[error("factorization error: {0}")]
    Factorization(String),

    /// Evaluation exactly at a singular point.
    #[error("singularity: {0}")]
    Singularity(String),
}

pub type Result<T> = std::result::Result<T, FasError>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(FasError::Domain(format!("{name} must be finite, got {x}")))
    }
}
