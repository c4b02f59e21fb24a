//! Command-line front end for `eps-core`: JSON configs, CSV output, a
//! parallel Monte Carlo executor and the table reproduction report.

pub mod commands;
pub mod config;
pub mod engines;
pub mod error;
pub mod output;
pub mod parallel;
pub mod tables;

pub use commands::Options;
pub use config::RunConfig;
pub use error::{CliError, CliResult};
