//! Errors raised by geometric constructions.

use thiserror::Error;

/// Failure modes of the geometric constructions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    /// The energy lies outside the window where the critical set is non-empty.
    #[error("critical set is empty: {0}")]
    EmptyCritical(String),
    /// A continued-fraction remainder vanished: `ω` is rational in floating point.
    #[error("frequency {0} is rational to floating-point precision")]
    RationalOmega(f64),
    /// A required translate-disjointness condition fails.
    #[error("disjointness fails: {condition} (first offending shift m = {offender})")]
    DisjointnessFailure {
        /// The condition that failed.
        condition: String,
        /// Smallest offending translate.
        offender: i64,
    },
    /// The small-value set of a probe function does not have an allowed shape.
    #[error("unresolved probe shape ({n_arcs} arcs): {reason}")]
    UnresolvedShape {
        /// What failed.
        reason: String,
        /// Number of arcs found.
        n_arcs: usize,
    },
    /// A hypothesis on the input functions fails.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    /// An argument violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
