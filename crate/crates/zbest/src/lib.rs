//! Experiment driver for `zbest-core`: run configurations, reproducible
//! parallel Monte Carlo, report and law formats.

pub mod config;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod report;
pub mod substream;

pub use config::{ExperimentConfig, Format, Mode, Process};
pub use error::{ExperimentError, Result};
pub use experiment::run;
pub use report::ExperimentReport;
