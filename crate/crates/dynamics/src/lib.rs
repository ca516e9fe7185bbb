//! Iteration of the projective fiber map `Φ_E(θ, r) = (θ + ω, λf(θ) − E − 1/r)`.
//!
//! Orbits keep the factorization of the running product `r_0⋯r_k` into
//! factors `ρ_i` bounded away from zero: a slope with `|r_j| < λ^{−2}` is
//! merged with its successor, and `r_j·r_{j+1} = r_j·v(θ_j) − 1` is then of
//! modulus at least `1/2`. Products are only ever held as sums of logs.
//!
//! On top of orbits the crate provides the shadowing decomposition that
//! expresses any orbit through the reference orbit started at `∞`, the
//! closed-form gap between two orbits, and the θ- and E-derivatives of the
//! reference orbit.

pub mod derivative;
pub mod error;
pub mod orbit;
pub mod shadow;

pub use derivative::{orbit_de, orbit_dtheta};
pub use error::DynamicsError;
pub use orbit::{iterate, phi_step, reference_orbit, PairedOrbit, RhoFactor};
pub use shadow::{contraction_gap, shadow_decompose, ShadowDecomposition};
