//! Geometry of the critical set and of the probe functions that drive the
//! multi-scale construction.
//!
//! * [`critical_set`]: the arcs where `|λf(θ) − E| ≤ 2λ^{3/4}`.
//! * [`diophantine_n`], [`estimate_dc_constants`]: how far translates of a
//!   short arc stay disjoint under rotation by `ω`.
//! * [`build_base_scale`]: the first scale `(I_0, K_0, M_0, ν_0)` with its
//!   disjointness checks.
//! * [`probe`]: the set where `φ(θ) = π₂(Φ^{M+K}(θ − Mω, ∞))` is small, and its
//!   classification into the allowed shapes.
//! * [`classify_shifted_hyperbola`]: the two cases for `ψ = s − h/g`.

pub mod base;
pub mod critical;
pub mod diophantine;
pub mod error;
pub mod hyperbola;
pub mod probe;

pub use base::{base_scale_report, build_base_scale, build_base_scale_with, BaseSchedule, BaseScale, DisjointnessCheck};
pub use critical::{critical_set, CriticalSet};
pub use diophantine::{diophantine_n, entry_time, estimate_dc_constants, DcEstimate};
pub use error::GeometryError;
pub use hyperbola::{classify_shifted_hyperbola, HyperbolaClass, HyperbolaKind};
pub use probe::{
    phi, probe, probe_fn, probe_sample, scan, scan_fn, Bend, Branch, DerivStats, PoleModel, ProbeResult, ProbeSample, ProbeScan, Shape,
};
