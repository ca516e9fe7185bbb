//! Shared domain types for quasi-periodic Schrödinger cocycles.
//!
//! The cocycle is `(θ, x) ↦ (θ + ω, A_E(θ) x)` over the circle rotation by
//! `ω`, with transfer matrix `A_E(θ) = [[0, 1], [−1, λf(θ) − E]]`. This crate
//! holds the pieces every other crate builds on: circle arithmetic and finite
//! unions of arcs, the potential `f` with analytic derivatives, points of the
//! projective line in homogeneous coordinates, renormalized `SL(2,ℝ)`
//! matrices, and the parameter bundle `(λ, E, ω, f, κ, τ)`.

pub mod circle;
pub mod error;
pub mod params;
pub mod potential;
pub mod projective;
pub mod sl2;

pub use circle::{circle_dist, wrap, Arc, CircleSet};
pub use error::CoreError;
pub use params::{CocycleParams, GOLDEN_OMEGA};
pub use potential::{validate_potential, PotentialFn, ValidationReport, DEFAULT_D2F_FLOOR};
pub use projective::{ProjPoint, Slope};
pub use sl2::SL2Mat;
