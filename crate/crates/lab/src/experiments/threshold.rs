use std::f64::consts::PI;

use fockgibbs::cgibbs::subcritical_moment;
use fockgibbs::model::{shoot_soliton, soliton, ModelParams};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::report::{Cell, Check, Report, Table};
use crate::suites::gns_suite;

/// Soliton norms from shooting against their closed forms, the GNS sweep, and the
/// subcritical sextic moment across windows `k_max = 1..=k_max`.
pub fn exp_threshold_suite(config: &ExperimentConfig) -> LabResult<Report> {
    let shot = shoot_soliton()?;
    let exact = soliton();
    let gns = gns_suite(config.gns_trials, config.seed)?;
    let sharp = 4.0 / (PI * PI);

    let mut table = Table::new("threshold", &["quantity", "computed", "reference", "abs_error"]);
    let rows = [
        ("soliton_mass", shot.mass, exact.mass),
        ("soliton_kinetic", shot.kinetic, exact.kinetic),
        ("soliton_sextic_identity", shot.sextic, 3.0 * shot.kinetic),
        ("gns_constant", 3.0 / (shot.mass * shot.mass), sharp),
        ("gns_max_ratio", sharp + gns.worst, sharp),
        ("gns_violations", gns.violations as f64, 0.0),
    ];
    for (name, computed, reference) in rows {
        table.push(vec![Cell::from(name), computed.into(), reference.into(), (computed - reference).abs().into()]);
    }
    let soliton_err = rows[..4].iter().map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max);

    let moments = (1..=config.k_max)
        .into_par_iter()
        .map(|k_max| {
            let p = ModelParams::new(config.tau[0], config.eps[0], config.eta[0], config.k_cut, k_max)?;
            let m = subcritical_moment(&p, config.subcritical_k, 0.0, config.samples, config.seed)?;
            Ok((m.value, m.stderr))
        })
        .collect::<LabResult<Vec<(f64, f64)>>>()?;
    let mut moment_table = Table::new("threshold_moments", &["k_max", "moment", "moment_stderr"]);
    for (k, &(v, e)) in moments.iter().enumerate() {
        moment_table.push(vec![(k + 1).into(), v.into(), e.into()]);
    }
    let widest = moments
        .iter()
        .flat_map(|a| moments.iter().map(move |b| (a.0 - b.0).abs() / a.1.hypot(b.1)))
        .filter(|z| z.is_finite())
        .fold(0.0, f64::max);

    let checks = vec![
        Check::new("soliton norms", soliton_err <= 1e-6, format!("worst deviation {soliton_err:.3e}")),
        Check::new(
            "gns sweep",
            gns.clean(),
            format!("{} violations over {} profiles, max ratio − 4/π² = {:.4e}", gns.violations, gns.trials, gns.worst),
        ),
        Check::new(
            "subcritical moment uniform in k_max",
            widest <= 3.0,
            format!("K_s = {}: widest gap {widest:.2} combined stderr", config.subcritical_k),
        ),
    ];
    Ok(Report { tables: vec![table, moment_table], checks })
}
