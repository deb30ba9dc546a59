use fockgibbs::cgibbs::capped_partition;
use fockgibbs::qgibbs::relative_partition;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::report::{fmt_series, Check, Report, Table};
use crate::stats::exceeds;

struct Row {
    k_cut: f64,
    eps: f64,
    capped: (f64, f64),
    quantum: f64,
}

/// Capped classical partition functions along the ε sweep above the threshold (`k_cut`)
/// and below it (`control_k_cut`), with the quantum relative partition at the first τ.
pub fn exp_blowup(config: &ExperimentConfig) -> LabResult<Report> {
    let (tau, eta) = (config.tau[0], config.eta[0]);
    let points: Vec<(f64, f64)> =
        [config.k_cut, config.control_k_cut].iter().flat_map(|&k| config.eps.iter().map(move |&e| (k, e))).collect();
    let rows = points
        .par_iter()
        .map(|&(k_cut, eps)| {
            let p = config.params_at(k_cut, tau, eps, eta)?;
            let cutoff = config.cutoff_at(k_cut, eta)?;
            let c = capped_partition(&p, config.r_cap, &cutoff, config.samples, config.seed)?;
            let quantum = relative_partition(&p, true, &cutoff)?;
            Ok(Row { k_cut, eps, capped: (c.value, c.stderr), quantum })
        })
        .collect::<LabResult<Vec<Row>>>()?;

    let mut table = Table::new("blowup", &["k_cut", "eps", "r_cap", "capped", "capped_stderr", "q_ratio"]);
    for r in &rows {
        table.push(vec![
            r.k_cut.into(),
            r.eps.into(),
            config.r_cap.into(),
            r.capped.0.into(),
            r.capped.1.into(),
            r.quantum.into(),
        ]);
    }
    let (above, control) = rows.split_at(config.eps.len());
    let increasing = above.windows(2).all(|w| exceeds(w[1].capped, w[0].capped, 3.0));
    let q_increasing = above.windows(2).all(|w| w[1].quantum > w[0].quantum);
    let spread = control
        .iter()
        .flat_map(|a| control.iter().map(move |b| (a.capped.0 - b.capped.0).abs() / a.capped.1.hypot(b.capped.1)))
        .filter(|z| z.is_finite())
        .fold(0.0, f64::max);
    let series = |rs: &[Row]| fmt_series(&rs.iter().map(|r| r.capped.0).collect::<Vec<_>>());
    let checks = vec![
        Check::new(
            "capped partition increasing above threshold",
            increasing,
            format!("K = {}: capped = {} along eps = {:?}", config.k_cut, series(above), config.eps),
        ),
        Check::new(
            "quantum ordering matches",
            q_increasing,
            format!("tau = {tau}: q_ratio = {}", fmt_series(&above.iter().map(|r| r.quantum).collect::<Vec<_>>())),
        ),
        Check::new(
            "control within stderr band",
            spread <= 3.0,
            format!(
                "K = {}: capped = {}, widest gap {spread:.2} combined stderr",
                config.control_k_cut,
                series(control)
            ),
        ),
    ];
    Ok(Report { tables: vec![table], checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;

    #[test]
    fn larger_cap_never_lowers_the_column() {
        let mut c = ExperimentConfig::defaults(ExperimentKind::Blowup);
        c.eps = vec![0.2];
        c.samples = 20_000;
        let mut last = 0.0;
        for r_cap in [0.0, 1.0, 5.0, 30.0] {
            c.r_cap = r_cap;
            let r = exp_blowup(&c).unwrap();
            let v = r.table("blowup").unwrap().column("capped").unwrap()[0];
            assert!(v >= last, "{v} < {last} at R = {r_cap}");
            last = v;
        }
    }
}
