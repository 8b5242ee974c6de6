//! Scenario runner, file formats and CLI plumbing around `gphase-core`.
//!
//! A scenario describes a fibre path, an initial photon state and an operator
//! ordering. Running it computes the closed-form phase, integrates the
//! Schrödinger equation, compares the two and writes a per-step CSV plus a JSON
//! summary. See the repository README for the file layouts.

// `!(x > 0.0)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod config;
mod error;
pub mod formats;
pub mod runner;
pub mod sweep;

pub use config::ScenarioConfig;
pub use error::RunError;
pub use runner::{run_scenario, RunReport};
