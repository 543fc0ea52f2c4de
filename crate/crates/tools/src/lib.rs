//! Std companion to `rateq-core`: TOML run configs, CSV artifacts,
//! seed-parallel replication and the `rateq` command-line tool.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;

pub use error::{CliError, Result};
