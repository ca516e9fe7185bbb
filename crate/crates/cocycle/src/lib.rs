//! Quantitative invariants of the Schrödinger cocycle `(ω, A_E)`.
//!
//! Products of transfer matrices are renormalized by powers of two at every
//! step, so `log ‖A^n_E(θ)‖` is available for any `n`. The Lyapunov exponent
//! has two estimators (matrix norms, and log-sums of fiber slopes after a
//! burn-in); a grid certificate checks uniform exponential growth of the
//! slope products; the fibered rotation number is read off the sign changes
//! of a solution of the eigenvalue equation.

pub mod certificate;
pub mod lyapunov;
pub mod product;
pub mod rotation;

pub use certificate::{certify_uh, UHCertificate, UHVerdict};
pub use lyapunov::{lyapunov, Estimator, LyapunovEstimate};
pub use product::{cocycle_product, transfer_matrix};
pub use rotation::{gap_label, rotation_number};
