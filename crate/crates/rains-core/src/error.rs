//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, validation, and solver entry points.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix that must be square is not.
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Matrix size does not factor as the declared local dimensions.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// Total dimension exceeds the supported cap.
    #[error("total dimension {dim} exceeds the supported cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    /// A Hermitian matrix was required.
    #[error("matrix is not Hermitian: max |X - X†| entry = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// A unit-trace matrix was required.
    #[error("trace must be 1, found {trace:.17}")]
    InvalidTrace { trace: f64 },

    /// A positive semidefinite matrix was required.
    #[error("matrix is not positive semidefinite: min eigenvalue = {min_eig:.3e}")]
    NotPsd { min_eig: f64 },

    /// Invalid rank request for the random-state sampler.
    #[error("invalid rank {rank} for dimension {dim} (need 1 ≤ rank ≤ dim)")]
    InvalidRank { rank: usize, dim: usize },

    /// A scalar parameter lies outside its admissible range.
    #[error("parameter out of range: {context}")]
    OutOfRange { context: String },

    /// Rényi order outside the data-processing validity window of its variant.
    #[error("alpha = {alpha} outside the validity window of the {variant} variant ({window})")]
    AlphaOutOfWindow {
        alpha: f64,
        variant: &'static str,
        window: &'static str,
    },

    /// An instrument failed structural validation.
    #[error("invalid selective PPT operation: {context}")]
    InvalidOperation { context: String },

    /// Random sampling failed to produce a valid object within the attempt cap.
    #[error("sampling failed after {attempts} attempts: {context}")]
    SamplingFailed { attempts: usize, context: String },

    /// The feasibility projection did not converge within its iteration cap.
    #[error("projection did not converge within {iters} iterations (residual {residual:.3e})")]
    ProjectionStalled { iters: usize, residual: f64 },

    /// An assembled report failed one of its internal consistency assertions.
    #[error("internal consistency violated: {context}")]
    Inconsistent { context: String },

    /// JSON (de)serialization failure.
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    /// Filesystem failure.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input file contents.
    #[error("invalid input file: {context}")]
    InvalidInput { context: String },
}

/// Convenience result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Helper for dimension-mismatch errors with formatted context.
    pub(crate) fn dim(context: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
        }
    }

    /// Helper for range errors with formatted context.
    pub(crate) fn range(context: impl Into<String>) -> Self {
        Error::OutOfRange {
            context: context.into(),
        }
    }

    /// Helper for malformed-input errors with formatted context.
    pub(crate) fn invalid_input(context: impl Into<String>) -> Self {
        Error::InvalidInput {
            context: context.into(),
        }
    }
}
