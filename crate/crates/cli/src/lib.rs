//! Command-line front end for the Euler-angle spin library: configuration
//! parsing, simulation commands, and CSV/JSON output.

pub mod commands;
pub mod config;

pub use commands::{run, Outcome, RunError};
pub use config::{parse_config, ConfigError, RunConfig};
