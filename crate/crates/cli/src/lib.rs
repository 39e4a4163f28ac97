//! Command-line driver for `hydro-core`: snapshot files, CSV diagnostics and the `hydro` commands.

pub mod commands;
pub mod config;
pub mod io;

pub use commands::{execute, Cli, CliError, Command};
