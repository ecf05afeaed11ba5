//! Batch driver for `ncosc-core`: JSON run configurations, report writers and
//! the structure-constant and operator file formats.
//!
//! All inputs are dimensionless with ħ = 1; `M` and `ω` set the scales.

pub mod config;
pub mod error;
pub mod formats;
pub mod run;

pub use config::{Command, Format, RunConfig, SCHEMA_VERSION};
pub use error::CliError;
pub use run::{execute, run, Outcome, Report};
