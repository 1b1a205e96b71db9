//! File formats, the suite runner and the `cbddl` command-line tool.
//!
//! The language, simulator and metrics live in [`cbddl_core`]; this crate
//! adds everything that touches the file system or threads.

pub mod cli;
pub mod commands;
mod error;
pub mod formats;
pub mod manifest;
pub mod seeds;

pub use error::{CliError, CliResult};
