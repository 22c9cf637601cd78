//! Batch front end for `geomatch`: curve files, synthetic generators, the
//! subcommands and the energy convergence study.

pub mod commands;
pub mod config;
pub mod converge;
pub mod error;
pub mod generate;
pub mod io;

pub use commands::{run, Cli, Command};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
