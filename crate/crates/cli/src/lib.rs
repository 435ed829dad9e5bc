//! Command-line driver: run configuration, check registry, demos and reports.

pub mod config;
pub mod demo;
pub mod error;
pub mod report;
pub mod suites;

pub use config::{Preset, RunConfig, ScalarMode, Suite};
pub use error::{CliError, CliResult};
pub use report::{Format, Report};
