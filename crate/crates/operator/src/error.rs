//! Errors raised by operator computations.

use thiserror::Error;

/// Failure modes of gap detection and eigenvector construction.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    /// The density of states jumps by more than `10/n` between adjacent grid
    /// energies; the grid must be refined there.
    #[error("energy grid too coarse: ids jumps by {jump:.3e} on [{e_lo}, {e_hi}]")]
    GridTooCoarse {
        /// Left grid energy.
        e_lo: f64,
        /// Right grid energy.
        e_hi: f64,
        /// Jump in the density of states.
        jump: f64,
    },
    /// No eigenvalue of the truncation lies within `10/n` of the target.
    #[error("no eigenvalue within {tolerance:e} of {target}; nearest is {nearest}")]
    NoNearbyEigenvalue {
        /// Requested energy.
        target: f64,
        /// Closest eigenvalue found.
        nearest: f64,
        /// Allowed distance.
        tolerance: f64,
    },
    /// An argument violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
