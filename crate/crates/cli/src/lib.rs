//! Batch front end: read a run config, execute it, write result files.

pub mod config;
pub mod error;
pub mod plot;
pub mod run;

pub use config::{Resolved, RunConfig};
pub use error::CliError;
pub use run::{run, run_path, Overrides, RunReport};
