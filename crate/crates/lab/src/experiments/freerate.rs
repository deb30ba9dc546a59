use fockgibbs::cgibbs::MassLaw;
use fockgibbs::model::CutoffProfile;
use fockgibbs::qgibbs::{log_free_partition, log_free_partition_exact};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::report::{fmt_series, Check, Report, Table};
use crate::stats::affine_fit;

/// `(Tr[Γ_{τ,0} f(𝒩/τ)], ∫f(‖u‖²)dμ₀)`: the free quantum state by exact sector summation
/// and the free classical mass law by quadrature of its inverted density.
pub fn free_rate_error(k_max: usize, tau: f64, cutoff: &CutoffProfile) -> LabResult<(f64, f64)> {
    let quantum = (log_free_partition(k_max, tau, cutoff) - log_free_partition_exact(k_max, tau)).exp();
    let classical = MassLaw::new(k_max).cutoff_expectation(cutoff)?;
    Ok((quantum, classical))
}

pub fn exp_free_state_rate(config: &ExperimentConfig) -> LabResult<Report> {
    let cutoff = config.cutoff_profile()?;
    let pairs = config
        .tau
        .par_iter()
        .map(|&tau| free_rate_error(config.k_max, tau, &cutoff))
        .collect::<LabResult<Vec<(f64, f64)>>>()?;
    let mut table = Table::new("freerate", &["tau", "quantum", "classical", "error"]);
    let mut errors = Vec::new();
    for (&tau, &(q, c)) in config.tau.iter().zip(&pairs) {
        errors.push((q - c).abs());
        table.push(vec![tau.into(), q.into(), c.into(), (q - c).abs().into()]);
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let log_tau: Vec<f64> = config.tau.iter().map(|t| t.ln()).collect();
    let log_err: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let fit = affine_fit(&log_tau, &log_err);
    let checks = vec![
        Check::new("error decreasing in tau", decreasing, format!("error = {}", fmt_series(&errors))),
        Check::new("log-log slope", fit.slope <= -0.2, format!("slope {:.4} (R² {:.4})", fit.slope, fit.r_squared)),
    ];
    Ok(Report { tables: vec![table], checks })
}
