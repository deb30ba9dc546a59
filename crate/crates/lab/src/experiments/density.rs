use fockgibbs::cgibbs::classical_moment_matrix;
use fockgibbs::linalg::{hermitian_eigenvalues, symmetric_eigenvalues};
use fockgibbs::qgibbs::{build_gibbs, reduced_density_matrix};
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::report::{fmt_series, Check, Report, Table};
use crate::stats::decreasing_trend;

const STRUCTURE_TOL: f64 = 1e-12;

/// `(Hermitian, PSD)` flags of a real symmetric candidate.
fn real_structure(m: &DMatrix<f64>) -> LabResult<(bool, bool)> {
    let scale = m.amax().max(1.0);
    let hermitian = (m - m.transpose()).amax() <= STRUCTURE_TOL * scale;
    let sym = (m + m.transpose()) * 0.5;
    let psd = symmetric_eigenvalues(&sym)?.min() >= -STRUCTURE_TOL * scale;
    Ok((hermitian, psd))
}

/// Trace-norm distance between `Γ⁽¹⁾/τ` and the classical one-body moment matrix.
pub fn exp_density_convergence(config: &ExperimentConfig) -> LabResult<Report> {
    let cutoff = config.cutoff_profile()?;
    let base = config.params(config.tau[0])?;
    let classical =
        classical_moment_matrix(&base, config.interaction.classical(), &cutoff, config.samples, config.seed)?;
    let c_scale = classical.value.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let c_hermitian =
        (&classical.value - classical.value.adjoint()).iter().all(|c| c.norm() <= STRUCTURE_TOL * c_scale);
    let c_psd = hermitian_eigenvalues(&classical.hermitian())?.min() >= -STRUCTURE_TOL * c_scale;

    let quantum = config
        .tau
        .par_iter()
        .map(|&tau| {
            let p = config.params(tau)?;
            let state = build_gibbs(&p, config.interaction.interacting(), &cutoff)?.state()?;
            Ok(reduced_density_matrix(&state, 1, Some(tau))?)
        })
        .collect::<LabResult<Vec<DMatrix<f64>>>>()?;

    let mut table = Table::new(
        "density",
        &[
            "tau",
            "trace_distance",
            "trace_distance_stderr",
            "quantum_hermitian",
            "quantum_psd",
            "classical_hermitian",
            "classical_psd",
        ],
    );
    let (mut dist, mut err) = (Vec::new(), Vec::new());
    let mut structural = c_hermitian && c_psd;
    for (&tau, q) in config.tau.iter().zip(&quantum) {
        let (d, e) = classical.trace_distance(q)?;
        let (q_hermitian, q_psd) = real_structure(q)?;
        structural &= q_hermitian && q_psd;
        dist.push(d);
        err.push(e);
        table.push(vec![
            tau.into(),
            d.into(),
            e.into(),
            q_hermitian.into(),
            q_psd.into(),
            c_hermitian.into(),
            c_psd.into(),
        ]);
    }
    let trend = decreasing_trend(&dist, &err);
    let checks = vec![
        Check::new(
            "trace distance decreasing in tau",
            trend.holds(),
            format!("distance = {}, rises {} (excused {})", fmt_series(&dist), trend.rises, trend.excused),
        ),
        Check::new("hermitian and psd", structural, "both one-body matrices in every row".into()),
    ];
    Ok(Report { tables: vec![table], checks })
}
