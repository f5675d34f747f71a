//! Command-line front end: `dither`, `undither`, `metrics`, `histogram`
//! and `profile` subcommands over PGM files.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

pub use args::Cli;
pub use error::CliError;
