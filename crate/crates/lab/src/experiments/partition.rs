use fockgibbs::cgibbs::classical_relative_partition;
use fockgibbs::qgibbs::{build_gibbs, cutoff_relative_partition, log_free_partition};
use rayon::prelude::*;

use crate::config::{Coupling, ExperimentConfig};
use crate::error::LabResult;
use crate::report::{fmt_series, Check, Report, Table};
use crate::stats::decreasing_trend;

/// Quantum `𝒵^f_τ/𝒵^f_{τ,0}` along the τ sweep against the classical `∫e^{𝒲^ε}dμ^f_0`.
pub fn exp_partition_convergence(config: &ExperimentConfig) -> LabResult<Report> {
    let cutoff = config.cutoff_profile()?;
    let base = config.params(config.tau[0])?;
    let classical =
        classical_relative_partition(&base, config.interaction.classical(), &cutoff, config.samples, config.seed)?;
    let quantum = config
        .tau
        .par_iter()
        .map(|&tau| {
            let p = config.params(tau)?;
            Ok(match config.interaction {
                Coupling::Hartree => cutoff_relative_partition(&p, &cutoff)?,
                Coupling::None => {
                    let free = build_gibbs(&p, false, &cutoff)?.log_partition();
                    (free - log_free_partition(p.k_max, tau, &cutoff)).exp()
                }
            })
        })
        .collect::<LabResult<Vec<f64>>>()?;

    let mut table = Table::new("partition", &["tau", "q_ratio", "c_value", "c_stderr", "abs_diff"]);
    let mut diffs = Vec::new();
    for (&tau, &q) in config.tau.iter().zip(&quantum) {
        let diff = (q - classical.value).abs();
        diffs.push(diff);
        table.push(vec![tau.into(), q.into(), classical.value.into(), classical.stderr.into(), diff.into()]);
    }

    let mut checks = Vec::new();
    match config.interaction {
        Coupling::None => {
            let worst = quantum.iter().map(|q| (q - 1.0).abs()).fold((classical.value - 1.0).abs(), f64::max);
            checks.push(Check::new("free ratios equal one", worst < 1e-10, format!("max |value − 1| = {worst:.3e}")));
        }
        Coupling::Hartree => {
            let stderr = vec![classical.stderr; diffs.len()];
            let trend = decreasing_trend(&diffs, &stderr);
            checks.push(Check::new(
                "abs_diff decreasing in tau",
                trend.holds(),
                format!("abs_diff = {}, rises {} (excused {})", fmt_series(&diffs), trend.rises, trend.excused),
            ));
            let last = *diffs.last().expect("nonempty sweep");
            let allowed = 0.02f64.max(3.0 * classical.stderr);
            checks.push(Check::new(
                "final gap",
                last <= allowed,
                format!("|q − c| = {last:.4e} at tau = {}, allowed {allowed:.4e}", config.tau.last().unwrap()),
            ));
        }
    }
    Ok(Report { tables: vec![table], checks })
}
