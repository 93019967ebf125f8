//! The `dogforge` command line and its file formats, on top of
//! `dogforge-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod designs;
pub mod error;
pub mod output;
pub mod parallel;

pub use error::{CliError, CliResult, ErrorKind};
