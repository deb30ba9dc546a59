//! Desk-scale experiments over the `fockgibbs` engine: configuration, sweeps, CSV
//! tables, run manifests and the command-line driver.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod selftest;
pub mod stats;
pub mod suites;

pub use config::{Coupling, CutoffKind, ExperimentConfig, ExperimentKind};
pub use error::{LabError, LabResult};
pub use report::{fmt_series, Cell, Check, Report, Table};
