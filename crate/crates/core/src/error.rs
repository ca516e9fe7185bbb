//! Error type shared by the core types.

use thiserror::Error;

/// Failures raised while constructing or validating core types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The potential is not a Morse function with exactly two critical points.
    #[error("potential rejected: {0}")]
    InvalidPotential(String),
    /// A potential description (e.g. a Fourier coefficient file) could not be parsed.
    #[error("cannot parse potential: {0}")]
    Parse(String),
}
