//! Parameter sweeps and reports over the cocycle, operator and multi-scale
//! construction crates.
//!
//! A [`RunConfig`] is assembled from defaults, an optional `key=value` file
//! and command-line flags, in that order. Every output embeds the
//! configuration and [`VERSION`], so re-running from the emitted
//! configuration reproduces it byte for byte.

pub mod commands;
pub mod config;
pub mod density;

pub use commands::{classify_one, spectrum_report, start_phase, uh_verdict, Command, Report};
pub use config::{CliError, ModeName, RunConfig, VERSION};
pub use density::visited_fraction;
