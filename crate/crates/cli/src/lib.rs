//! Command-line driver: configuration loading, dataset commands and CSV output.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;

pub use commands::{run, Cli, Command};
pub use config::{Preset, RunConfig};
pub use error::CliError;
