use fockgibbs::qgibbs::build_gibbs;
use fockgibbs::semiclassics::{tail_moment, tail_moment_masses};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::report::{fmt_series, Check, Report, Table};
use crate::stats::affine_fit;

/// Pinned regression value of the vacuum row (three modes, `τ = 10`, `R = 1`).
pub const VACUUM_TAIL_PIN: f64 = 0.00402502;

/// Sextic Husimi tail beyond `K² + tail_offset` of the interacting Gibbs state along the τ
/// sweep, fitted by `log tail ≈ a + bτ`, plus the vacuum regression row.
pub fn exp_tail_decay(config: &ExperimentConfig) -> LabResult<Report> {
    let cutoff = config.cutoff_profile()?;
    let level = config.k_cut * config.k_cut + config.tail_offset;
    let tails = config
        .tau
        .par_iter()
        .map(|&tau| {
            let blocks = build_gibbs(&config.params(tau)?, true, &cutoff)?;
            Ok(tail_moment(&blocks, level)?)
        })
        .collect::<LabResult<Vec<f64>>>()?;
    let vacuum = tail_moment_masses(&[(0, 1.0)], 3, 1.0, 10.0);

    let mut table = Table::new("tail", &["state", "tau", "r_level", "tail", "log_tail"]);
    for (&tau, &t) in config.tau.iter().zip(&tails) {
        table.push(vec!["gibbs".into(), tau.into(), level.into(), t.into(), t.ln().into()]);
    }
    table.push(vec!["vacuum".into(), 10.0.into(), 1.0.into(), vacuum.into(), vacuum.ln().into()]);

    let logs: Vec<f64> = tails.iter().map(|t| t.ln()).collect();
    let fit = affine_fit(&config.tau, &logs);
    let pin_error = (vacuum - VACUUM_TAIL_PIN).abs();
    let checks = vec![
        Check::new(
            "log tail affine decay",
            fit.slope < 0.0 && fit.r_squared >= 0.95,
            format!("tail = {}, slope {:.4e}, R² {:.4}", fmt_series(&tails), fit.slope, fit.r_squared),
        ),
        Check::new(
            "vacuum regression pin",
            pin_error <= 1e-8,
            format!("computed {vacuum:.10}, pinned {VACUUM_TAIL_PIN}, |diff| {pin_error:.3e}"),
        ),
    ];
    Ok(Report { tables: vec![table], checks })
}
