//! The multi-scale construction of the small-value sets `I_n`.
//!
//! Scale 0 comes from the critical set. Each step probes `I_n`, stops when
//! the small-value set vanishes, and otherwise builds `I_{n+1}` with the
//! integers `K_{n+1}`, `M_{n+1}`, `ν_{n+1}` chosen by direct search under
//! the translate-disjointness conditions. Growth audits sample orbits from
//! `Θ_n`, and [`classify_energy`] turns a run into a verdict on the energy.
//!
//! Two schedules are available: [`Mode::PaperConstants`], whose `K_n` grow
//! doubly exponentially, and [`Mode::Toy`] with `K_{n+1} ≥ ⌈K_n^growth⌉`.

pub mod audit;
pub mod classify;
pub mod error;
pub mod state;
pub mod step;

pub use audit::{product_growth_audit, sample_theta, AuditReport};
pub use classify::{classify_energy, compute_r_star, AuditRates, EnergyClass, EnergyReport, ProbeStats, RStar, ScaleLog};
pub use error::InductionError;
pub use state::{dilate, init_scale0, BranchRecord, Mode, Scale, ScaleState, ThetaSets};
pub use step::{inductive_step, step_from_probe, StepKind, StepOutcome};
