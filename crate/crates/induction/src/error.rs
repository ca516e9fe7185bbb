//! Errors of the multi-scale construction.

use qpc_geometry::GeometryError;
use thiserror::Error;

/// Failures that leave no state to report.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum InductionError {
    /// A geometric construction failed, for example a base-scale
    /// disjointness check in paper mode.
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// The nested sets `B_n` are not nested beyond float tolerance.
    #[error("B_{outer} does not contain B_{inner} (excess {excess:e})")]
    NotNested {
        /// Index of the larger set.
        outer: usize,
        /// Index of the set that should lie inside it.
        inner: usize,
        /// How far the inner endpoints stick out.
        excess: f64,
    },
    /// An argument is outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
