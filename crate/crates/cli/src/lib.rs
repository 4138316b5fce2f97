//! Experiment driver for the `qubitsec` command-line tool.
//!
//! Flags (optionally seeded from a TOML file) resolve into an
//! [`ExperimentConfig`]; each subcommand turns a config into a report whose
//! content depends only on that config.

pub mod commands;
pub mod config;
pub mod report;
pub mod strategy;

pub use commands::{cmd_attack, cmd_prop_check, cmd_session, Outcome};
pub use config::{AlphaGrid, CliError, ExperimentConfig, OutputFormat};
pub use report::{CheckResult, SessionSummary, SweepPoint, SweepReport};
pub use strategy::StrategySpec;

/// Exit status when every acceptance band passes.
pub const EXIT_PASS: u8 = 0;
/// Exit status when a statistical band fails.
pub const EXIT_BAND_FAILURE: u8 = 1;
/// Exit status for usage or configuration errors.
pub const EXIT_USAGE: u8 = 2;
