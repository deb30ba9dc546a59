//! Command-line driver: parses arguments, resolves the configuration, runs one
//! experiment on a dedicated thread pool and writes its tables and manifest.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{LabError, LabResult};
use crate::experiments;
use crate::report::Report;

/// Exit code of a selftest run in which some check failed.
pub const SELFTEST_FAILURE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "fockgibbs",
    version,
    about = "Quantum and classical Gibbs-state experiments on a truncated Fock space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML file whose keys override the experiment defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed of every Monte Carlo estimate.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory receiving the CSV tables and the manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantum relative partition against the classical Hartree partition along τ.
    Partition,
    /// Trace distance of the rescaled one-body density matrix to the classical moment matrix.
    Density,
    /// Capped classical partition along ε above and below the mass threshold.
    Blowup,
    /// Sextic Husimi tail of the Gibbs state along τ.
    Tail,
    /// Free-state cutoff expectation against the free classical mass law.
    Freerate,
    /// Soliton norms, GNS sweep and subcritical moments.
    Threshold,
    /// Closed-form examples and small runs of every property suite.
    Selftest,
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Partition => ExperimentKind::Partition,
            Command::Density => ExperimentKind::Density,
            Command::Blowup => ExperimentKind::Blowup,
            Command::Tail => ExperimentKind::Tail,
            Command::Freerate => ExperimentKind::Freerate,
            Command::Threshold => ExperimentKind::Threshold,
            Command::Selftest => ExperimentKind::Selftest,
        }
    }
}

#[derive(Serialize)]
struct ManifestCheck<'a> {
    name: &'a str,
    passed: bool,
    detail: &'a str,
}

#[derive(Serialize)]
struct ScalePoint {
    tau: f64,
    eps: f64,
    eta: f64,
    admissible: bool,
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    engine_version: &'a str,
    lab_version: &'a str,
    threads: usize,
    wall_seconds: f64,
    passed: bool,
    outputs: Vec<String>,
    config: &'a ExperimentConfig,
    checks: Vec<ManifestCheck<'a>>,
    theorem_scales: Vec<ScalePoint>,
}

fn resolve(cli: &Cli) -> LabResult<ExperimentConfig> {
    let kind = cli.command.kind();
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(kind, path)?,
        None => ExperimentConfig::defaults(kind),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    config.validate()?;
    Ok(config)
}

/// Diagnostic only: whether each sweep point meets the asymptotic scale relations.
fn theorem_scales(config: &ExperimentConfig) -> LabResult<Vec<ScalePoint>> {
    let mut points = Vec::new();
    for &tau in &config.tau {
        for &eps in &config.eps {
            for &eta in &config.eta {
                let admissible = config.params_at(config.k_cut, tau, eps, eta)?.theorem_scale_admissible();
                points.push(ScalePoint { tau, eps, eta, admissible });
            }
        }
    }
    Ok(points)
}

fn write_manifest(
    config: &ExperimentConfig,
    report: &Report,
    outputs: &[PathBuf],
    threads: usize,
    wall: f64,
) -> LabResult<PathBuf> {
    let manifest = Manifest {
        experiment: config.experiment.name(),
        engine_version: fockgibbs::VERSION,
        lab_version: env!("CARGO_PKG_VERSION"),
        threads,
        wall_seconds: wall,
        passed: report.passed(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        config,
        checks: report
            .checks
            .iter()
            .map(|c| ManifestCheck { name: &c.name, passed: c.passed, detail: &c.detail })
            .collect(),
        theorem_scales: theorem_scales(config)?,
    };
    let text = toml::to_string(&manifest).map_err(|e| LabError::Config(format!("cannot encode manifest: {e}")))?;
    let path = config.out.join(format!("{}_manifest.toml", config.experiment.name()));
    fs::write(&path, text)?;
    Ok(path)
}

fn execute(cli: &Cli) -> LabResult<Report> {
    let config = resolve(cli)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| LabError::Config(format!("cannot start thread pool: {e}")))?;
    let start = Instant::now();
    let report = pool.install(|| experiments::run(&config))?;
    let wall = start.elapsed().as_secs_f64();
    let outputs = report.write_tables(&config.out)?;
    let manifest = write_manifest(&config, &report, &outputs, pool.current_num_threads(), wall)?;
    for check in &report.checks {
        println!("{check}");
    }
    for path in outputs.iter().chain([&manifest]) {
        println!("wrote {}", path.display());
    }
    Ok(report)
}

/// Runs the command line and returns the process exit code: 0 on success, 1 for usage,
/// configuration and output errors, 2 for numerical failures, and 3 when a selftest check
/// fails.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) if cli.command.kind() == ExperimentKind::Selftest && !report.passed() => SELFTEST_FAILURE,
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
