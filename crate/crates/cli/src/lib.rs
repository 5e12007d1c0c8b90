//! Experiment runner for `eit-core`: reads a TOML experiment description,
//! runs one pipeline stage and writes CSV/PGM artifacts plus a `summary.json`
//! that lists every file it produced.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;

pub use commands::{run, Command};
pub use config::ExperimentConfig;
pub use error::CliError;
