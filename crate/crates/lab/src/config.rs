use std::fs;
use std::path::{Path, PathBuf};

use fockgibbs::cgibbs::Interaction;
use fockgibbs::model::{critical_mass, CutoffProfile, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Partition,
    Density,
    Blowup,
    Tail,
    Freerate,
    Threshold,
    Selftest,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Partition,
        ExperimentKind::Density,
        ExperimentKind::Blowup,
        ExperimentKind::Tail,
        ExperimentKind::Freerate,
        ExperimentKind::Threshold,
        ExperimentKind::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Partition => "partition",
            ExperimentKind::Density => "density",
            ExperimentKind::Blowup => "blowup",
            ExperimentKind::Tail => "tail",
            ExperimentKind::Freerate => "freerate",
            ExperimentKind::Threshold => "threshold",
            ExperimentKind::Selftest => "selftest",
        }
    }
}

/// Whether the quantum state and the classical weight carry the interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    None,
    Hartree,
}

impl Coupling {
    pub fn interacting(self) -> bool {
        self == Coupling::Hartree
    }

    pub fn classical(self) -> Interaction {
        match self {
            Coupling::None => Interaction::None,
            Coupling::Hartree => Interaction::Hartree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffKind {
    Smooth,
    Sharp,
}

/// Fully resolved configuration of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub tau: Vec<f64>,
    pub eps: Vec<f64>,
    pub eta: Vec<f64>,
    pub k_cut: f64,
    pub k_max: usize,
    pub samples: u64,
    pub seed: u64,
    pub out: PathBuf,
    pub interaction: Coupling,
    pub cutoff: CutoffKind,
    pub r_cap: f64,
    pub control_k_cut: f64,
    pub tail_offset: f64,
    pub subcritical_k: f64,
    pub gns_trials: usize,
}

/// On-disk form: every key optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<ExperimentKind>,
    tau: Option<Vec<f64>>,
    eps: Option<Vec<f64>>,
    eta: Option<Vec<f64>>,
    k_cut: Option<f64>,
    k_max: Option<usize>,
    samples: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    interaction: Option<Coupling>,
    cutoff: Option<CutoffKind>,
    r_cap: Option<f64>,
    control_k_cut: Option<f64>,
    tail_offset: Option<f64>,
    subcritical_k: Option<f64>,
    gns_trials: Option<usize>,
}

fn bad<T>(msg: String) -> LabResult<T> {
    Err(LabError::Config(msg))
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut c = Self {
            experiment: kind,
            tau: vec![20.0, 40.0, 80.0],
            eps: vec![0.5],
            eta: vec![0.1],
            k_cut: 0.6,
            k_max: 1,
            samples: 1_000_000,
            seed: 1,
            out: PathBuf::from("out"),
            interaction: Coupling::Hartree,
            cutoff: CutoffKind::Smooth,
            r_cap: 30.0,
            control_k_cut: 0.6,
            tail_offset: 0.5,
            subcritical_k: 0.6,
            gns_trials: 1000,
        };
        match kind {
            ExperimentKind::Blowup => {
                c.tau = vec![4.0];
                c.eps = vec![0.4, 0.2, 0.1];
                c.k_cut = 1.8;
            }
            ExperimentKind::Tail => c.tau = vec![10.0, 20.0, 40.0],
            ExperimentKind::Freerate => {
                c.tau = vec![1e2, 1e3, 1e4];
                c.eta = vec![0.2];
                c.k_cut = 1.0;
            }
            ExperimentKind::Threshold => {
                c.tau = vec![10.0];
                c.k_max = 3;
            }
            ExperimentKind::Selftest => {
                c.tau = vec![10.0];
                c.samples = 20_000;
            }
            ExperimentKind::Partition | ExperimentKind::Density => {}
        }
        c
    }

    /// Overlays the keys of a TOML document on the defaults of `kind`.
    pub fn from_toml_str(kind: ExperimentKind, text: &str) -> LabResult<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        if let Some(declared) = raw.experiment {
            if declared != kind {
                return bad(format!("config is for `{}` but `{}` was requested", declared.name(), kind.name()));
            }
        }
        let d = Self::defaults(kind);
        let c = Self {
            experiment: kind,
            tau: raw.tau.unwrap_or(d.tau),
            eps: raw.eps.unwrap_or(d.eps),
            eta: raw.eta.unwrap_or(d.eta),
            k_cut: raw.k_cut.unwrap_or(d.k_cut),
            k_max: raw.k_max.unwrap_or(d.k_max),
            samples: raw.samples.unwrap_or(d.samples),
            seed: raw.seed.unwrap_or(d.seed),
            out: raw.out.unwrap_or(d.out),
            interaction: raw.interaction.unwrap_or(d.interaction),
            cutoff: raw.cutoff.unwrap_or(d.cutoff),
            r_cap: raw.r_cap.unwrap_or(d.r_cap),
            control_k_cut: raw.control_k_cut.unwrap_or(d.control_k_cut),
            tail_offset: raw.tail_offset.unwrap_or(d.tail_offset),
            subcritical_k: raw.subcritical_k.unwrap_or(d.subcritical_k),
            gns_trials: raw.gns_trials.unwrap_or(d.gns_trials),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn load(kind: ExperimentKind, path: &Path) -> LabResult<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(kind, &text)
    }

    pub fn validate(&self) -> LabResult<()> {
        for (name, list) in [("tau", &self.tau), ("eps", &self.eps), ("eta", &self.eta)] {
            if list.is_empty() {
                return bad(format!("sweep `{name}` is empty"));
            }
            if list.iter().any(|v| !v.is_finite()) {
                return bad(format!("sweep `{name}` contains a non-finite value"));
            }
        }
        if self.samples < 2 {
            return bad(format!("samples must be at least 2, got {}", self.samples));
        }
        let single = |name: &str, list: &[f64]| {
            if list.len() == 1 {
                Ok(())
            } else {
                bad(format!("`{}` takes a single `{name}` value, got {}", self.experiment.name(), list.len()))
            }
        };
        match self.experiment {
            ExperimentKind::Partition | ExperimentKind::Density | ExperimentKind::Tail | ExperimentKind::Freerate => {
                single("eps", &self.eps)?;
                single("eta", &self.eta)?;
            }
            ExperimentKind::Blowup => {
                single("tau", &self.tau)?;
                single("eta", &self.eta)?;
                if !(self.r_cap >= 0.0 && self.r_cap.is_finite()) {
                    return bad(format!("r_cap must be finite and nonnegative, got {}", self.r_cap));
                }
                for &eps in &self.eps {
                    self.params_at(self.control_k_cut, self.tau[0], eps, self.eta[0])?;
                }
            }
            ExperimentKind::Threshold => {
                if self.k_max == 0 {
                    return bad("threshold compares k_max = 1..=k_max and needs k_max ≥ 1".into());
                }
                if !(self.subcritical_k > 0.0 && self.subcritical_k < critical_mass()) {
                    return bad(format!(
                        "subcritical_k must lie in (0, {}), got {}",
                        critical_mass(),
                        self.subcritical_k
                    ));
                }
                if self.gns_trials == 0 {
                    return bad("gns_trials must be positive".into());
                }
            }
            ExperimentKind::Selftest => {}
        }
        if self.experiment == ExperimentKind::Tail && !(self.tail_offset > 0.0) {
            return bad(format!("tail_offset must be positive, got {}", self.tail_offset));
        }
        for &tau in &self.tau {
            for &eps in &self.eps {
                for &eta in &self.eta {
                    self.params_at(self.k_cut, tau, eps, eta)?;
                }
            }
        }
        Ok(())
    }

    /// Validated parameters at the given sweep point.
    pub fn params_at(&self, k_cut: f64, tau: f64, eps: f64, eta: f64) -> LabResult<ModelParams> {
        ModelParams::new(tau, eps, eta, k_cut, self.k_max).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn params(&self, tau: f64) -> LabResult<ModelParams> {
        self.params_at(self.k_cut, tau, self.eps[0], self.eta[0])
    }

    pub fn cutoff_at(&self, k_cut: f64, eta: f64) -> LabResult<CutoffProfile> {
        let c = match self.cutoff {
            CutoffKind::Smooth => CutoffProfile::smooth(k_cut, eta),
            CutoffKind::Sharp => CutoffProfile::sharp(k_cut),
        };
        c.map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn cutoff_profile(&self) -> LabResult<CutoffProfile> {
        self.cutoff_at(self.k_cut, self.eta[0])
    }
}
