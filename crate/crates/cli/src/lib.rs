//! Scenario runner: parses a TOML scenario, runs one of the five commands and
//! writes CSV artifacts stamped with the SHA-256 of the config text.

// `!(x > 0.0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{run, run_scenario, Command, RunOptions, Summary, OUT_ENV};
pub use config::{Scenario, ScenarioConfig};
pub use error::{CliError, CliResult};
