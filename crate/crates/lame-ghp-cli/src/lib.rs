//! Batch command-line front end for `lame-ghp`: verification runs, parameter
//! scans, CGO identity sweeps and grating tables emitted as deterministic
//! JSON reports and CSV tables.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use cli::run;
pub use config::RunConfig;
pub use error::{CliError, CliResult};
