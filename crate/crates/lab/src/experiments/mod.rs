//! One function per experiment. Each returns the tables it emits and the trend or
//! inequality assertions evaluated on them.

mod blowup;
mod density;
mod freerate;
mod partition;
mod tail;
mod threshold;

pub use blowup::exp_blowup;
pub use density::exp_density_convergence;
pub use freerate::{exp_free_state_rate, free_rate_error};
pub use partition::exp_partition_convergence;
pub use tail::{exp_tail_decay, VACUUM_TAIL_PIN};
pub use threshold::exp_threshold_suite;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::LabResult;
use crate::report::Report;

pub fn run(config: &ExperimentConfig) -> LabResult<Report> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::Partition => exp_partition_convergence(config),
        ExperimentKind::Density => exp_density_convergence(config),
        ExperimentKind::Blowup => exp_blowup(config),
        ExperimentKind::Tail => exp_tail_decay(config),
        ExperimentKind::Freerate => exp_free_state_rate(config),
        ExperimentKind::Threshold => exp_threshold_suite(config),
        ExperimentKind::Selftest => crate::selftest::run(config),
    }
}
