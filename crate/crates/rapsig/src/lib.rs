//! Command-line companion of `rapsig-core`: JSON file formats, scenario
//! loading, thread-parallel Monte Carlo and the command implementations.

pub mod commands;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod scenario;
pub mod settings;
pub mod table1;

pub use error::{CliError, CliResult, Failure};
