//! Errors from orbit decompositions.

use thiserror::Error;

/// Failures of the decomposition hypotheses along an orbit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    /// A hypothesis of the decomposition fails at the requested step.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    /// A factor of a product is exactly zero or infinite.
    #[error("degenerate product: {0}")]
    ProductDegenerate(String),
}
