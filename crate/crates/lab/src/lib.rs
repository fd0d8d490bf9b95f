//! Experiment runner for the `tmslab-core` numerics: configuration, suites, JSON records,
//! CSV series and SVG plots.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod record;
pub mod report;
pub mod run;
pub mod suites;

pub use config::{Command, ExperimentConfig, Resolved};
pub use error::LabError;
pub use record::{Check, ResultRecord, Series};
pub use run::{execute, run};
