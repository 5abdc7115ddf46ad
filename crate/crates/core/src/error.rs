use thiserror::Error;

/// Errors produced by the lattice, model, solver and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum VlbmError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A state lies outside the admissible set of the conservation law.
    #[error("state outside admissible set: {0}")]
    Domain(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    /// A printed coefficient has a vanishing denominator (e.g. `(omega - 1)^2` at `omega = 1`).
    #[error("singular coefficient: {0}")]
    SingularCoefficient(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("degenerate mode: {0}")]
    DegenerateMode(String),

    /// Relative error requested against a reference with zero norm.
    #[error("relative error undefined: reference field has zero norm")]
    UndefinedError,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, VlbmError>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(VlbmError::DimensionMismatch { expected, got })
    }
}
