//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use fockgibbs::cgibbs::{mass_histogram, MassLaw};
use fockgibbs::model::{gns_constant, shoot_soliton, soliton};
use fockgibbs::quad::{integrate_to_infinity, QuadOptions};
use fockgibbs::semiclassics::antiwick_radial_scalar;
use fockgibbs_lab::experiments::{self, VACUUM_TAIL_PIN};
use fockgibbs_lab::suites;
use fockgibbs_lab::{ExperimentConfig, ExperimentKind, LabResult, Report};

const SEED: u64 = 1;

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> LabResult<(bool, String)>,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn experiment(kind: ExperimentKind) -> LabResult<Report> {
    experiments::run(&ExperimentConfig::defaults(kind))
}

fn summarize(report: &Report, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut lines = Vec::new();
    for name in names {
        match report.check(name) {
            Some(c) => {
                ok &= c.passed;
                lines.push(c.to_string());
            }
            None => {
                ok = false;
                lines.push(format!("missing check `{name}`"));
            }
        }
    }
    (ok, lines.join("; "))
}

fn soliton_threshold() -> LabResult<(bool, String)> {
    let shot = shoot_soliton()?;
    let exact = soliton();
    let ok = close(shot.mass, exact.mass, 1e-6)
        && close(shot.kinetic, exact.kinetic, 1e-6)
        && close(shot.sextic, 3.0 * shot.kinetic, 1e-6)
        && close(shot.mass, 2.720699, 1e-6)
        && close(shot.kinetic, 1.360350, 1e-6)
        && close(gns_constant(), 0.405285, 1e-6)
        && close(3.0 / (shot.mass * shot.mass), gns_constant(), 1e-6);
    Ok((
        ok,
        format!(
            "mass {:.9}, kinetic {:.9}, sextic {:.9} = 3 × {:.9}, C_GNS {:.9}",
            shot.mass,
            shot.kinetic,
            shot.sextic,
            shot.kinetic,
            3.0 / (shot.mass * shot.mass)
        ),
    ))
}

fn antiwick_gamma() -> LabResult<(bool, String)> {
    let suite = suites::antiwick_suite(1_000_000, SEED)?;
    let pinned = antiwick_radial_scalar(|x| if x > 1.0 { x.powi(3) } else { 0.0 }, &[1.0], 0, 3, 10.0)?;
    let pin_ok = close(pinned, VACUUM_TAIL_PIN, 1e-8);
    Ok((
        suite.clean() && pin_ok,
        format!(
            "{} of {} entries beyond 3 stderr (worst {:.2}); E[(Y/10)³1(Y>10)] = {pinned:.10} vs pinned {VACUUM_TAIL_PIN}",
            suite.violations, suite.trials, suite.worst
        ),
    ))
}

fn poisson_decomposition() -> LabResult<(bool, String)> {
    let s = suites::poisson_suite(100, SEED)?;
    Ok((s.clean(), format!("{} of {} configurations beyond 1e-9, worst {:.3e}", s.violations, s.trials, s.worst)))
}

fn inequality_suites() -> LabResult<(bool, String)> {
    let bl = suites::berezin_lieb_suite(30, 100_000, SEED)?;
    let df = suites::definetti_suite(50, SEED);
    let vac = suites::vacuum_definetti_equality(0.3);
    let pb = suites::peierls_bogoliubov_suite(100, SEED)?;
    let gt = suites::golden_thompson_suite(100, SEED)?;
    let var = suites::variational_suite(20, SEED)?;
    let gns = suites::gns_suite(1000, SEED)?;
    let vac_ok = vac.iter().all(|e| *e < 1e-12);
    let ok = bl.clean() && df.clean() && vac_ok && pb.clean() && gt.clean() && var.clean() && gns.clean();
    Ok((
        ok,
        format!(
            "violations: berezin-lieb {}/{}, de finetti {}/{} (vacuum equality {vac_ok}), peierls-bogoliubov {}/{}, \
             golden-thompson {}/{}, variational min gap {:.3e}, gns {}/{}",
            bl.violations,
            bl.trials,
            df.violations,
            df.trials,
            pb.violations,
            pb.trials,
            gt.violations,
            gt.trials,
            var.min_gap(),
            gns.violations,
            gns.trials
        ),
    ))
}

fn partition() -> LabResult<(bool, String)> {
    Ok(summarize(&experiment(ExperimentKind::Partition)?, &["abs_diff decreasing in tau", "final gap"]))
}

fn density() -> LabResult<(bool, String)> {
    Ok(summarize(&experiment(ExperimentKind::Density)?, &["trace distance decreasing in tau", "hermitian and psd"]))
}

fn tail() -> LabResult<(bool, String)> {
    Ok(summarize(&experiment(ExperimentKind::Tail)?, &["log tail affine decay"]))
}

fn freerate() -> LabResult<(bool, String)> {
    Ok(summarize(&experiment(ExperimentKind::Freerate)?, &["error decreasing in tau", "log-log slope"]))
}

fn blowup() -> LabResult<(bool, String)> {
    Ok(summarize(
        &experiment(ExperimentKind::Blowup)?,
        &["capped partition increasing above threshold", "control within stderr band"],
    ))
}

fn mass_law() -> LabResult<(bool, String)> {
    let law = MassLaw::new(1);
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 400 };
    let total = integrate_to_infinity(|x| law.density(x).unwrap_or(f64::NAN), 0.0, opts)?;

    let n = 1_000_000u64;
    let edges: Vec<f64> = (0..=24).map(|i| 0.5 * i as f64).collect();
    let counts = mass_histogram(1, &edges, n, SEED);
    let mut worst = 0.0f64;
    for (b, &c) in counts.iter().enumerate() {
        let p = law.interval_probability(edges[b], edges[b + 1])?;
        let binomial = (p * (1.0 - p) / n as f64).sqrt();
        worst = worst.max((c as f64 / n as f64 - p).abs() / binomial);
    }

    let single = MassLaw::new(0);
    let mut closed = 0.0f64;
    for x in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        closed = closed.max((single.density(x)? - 0.5 * (-0.5 * x).exp()).abs());
    }
    Ok((
        close(total, 1.0, 1e-6) && worst <= 3.0 && closed <= 1e-8,
        format!("∫ρ = {total:.10}, histogram sup deviation {worst:.2} binomial errors, single-mode error {closed:.2e}"),
    ))
}

fn main() {
    let criteria = [
        Criterion { name: "soliton and threshold constants", budget: Duration::from_secs(5), run: soliton_threshold },
        Criterion { name: "anti-wick gamma identity", budget: Duration::from_secs(60), run: antiwick_gamma },
        Criterion {
            name: "poisson coherent decomposition",
            budget: Duration::from_secs(60),
            run: poisson_decomposition,
        },
        Criterion { name: "inequality suites", budget: Duration::from_secs(300), run: inequality_suites },
        Criterion { name: "partition convergence", budget: Duration::from_secs(600), run: partition },
        Criterion { name: "density matrix convergence", budget: Duration::from_secs(600), run: density },
        Criterion { name: "tail decay", budget: Duration::from_secs(300), run: tail },
        Criterion { name: "free-state rate", budget: Duration::from_secs(120), run: freerate },
        Criterion { name: "blow-up contrast", budget: Duration::from_secs(300), run: blowup },
        Criterion { name: "mass law", budget: Duration::from_secs(60), run: mass_law },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = (c.run)().unwrap_or_else(|e| (false, format!("error: {e}")));
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let passed = ok && in_time;
        failed += usize::from(!passed);
        println!(
            "[{}] {:>2}. {} ({:.1} s of {} s): {detail}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
