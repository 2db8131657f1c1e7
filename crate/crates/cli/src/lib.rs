//! Scenario ingestion, command dispatch, reports and caching for the
//! `shaomega` command-line tool.

pub mod cache;
pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;
pub mod selftest;

pub use commands::{run, run_args, Cli, Outcome};
pub use error::CliError;
