//! Command-line front end for `pencilk`: JSON matrix files in, JSON or CSV
//! reports out.

pub mod commands;
pub mod config;
mod error;
pub mod examples;
pub mod format;
pub mod io;

pub use commands::Output;
pub use config::{Format, Overrides, RunConfig};
pub use error::{CliError, CliResult};
