use crate::error::{Error, Result};
use crate::model::{mode_count, CutoffProfile, KernelSpec};

/// Physical and numerical parameters shared by every module.
#[derive(Debug, Clone)]
pub struct ModelParams {
    /// Semiclassical parameter; typical particle numbers are of order `tau`.
    pub tau: f64,
    /// Interaction range.
    pub eps: f64,
    /// Width of the cutoff transition layer.
    pub eta: f64,
    /// Mass-cutoff level `K`; cutoffs are supported in `[0, K²]`.
    pub k_cut: f64,
    /// Fourier window `|k| ≤ k_max`.
    pub k_max: usize,
    /// Largest particle sector retained.
    pub n_max: usize,
    /// Largest sector dimension that may be enumerated.
    pub sector_cap: usize,
    pub kernel: KernelSpec,
}

pub const DEFAULT_SECTOR_CAP: usize = 5000;

impl ModelParams {
    /// Validated parameters with `n_max = max(1, ⌊K²τ⌋)`, the default kernel and sector cap.
    pub fn new(tau: f64, eps: f64, eta: f64, k_cut: f64, k_max: usize) -> Result<Self> {
        let p = Self {
            tau,
            eps,
            eta,
            k_cut,
            k_max,
            n_max: (k_cut * k_cut * tau).floor().max(1.0) as usize,
            sector_cap: DEFAULT_SECTOR_CAP,
            kernel: KernelSpec::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_n_max(mut self, n_max: usize) -> Result<Self> {
        self.n_max = n_max;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sector_cap(mut self, cap: usize) -> Self {
        self.sector_cap = cap;
        self
    }

    pub fn with_kernel(mut self, kernel: KernelSpec) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(tau, self.eps, self.eta, self.k_cut, self.k_max)
            .map(|p| p.with_sector_cap(self.sector_cap).with_kernel(self.kernel.clone()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return bad(format!("eps must lie in (0, 1], got {}", self.eps));
        }
        if !(self.k_cut > 0.0 && self.k_cut.is_finite()) {
            return bad(format!("K must be positive, got {}", self.k_cut));
        }
        if !(self.eta > 0.0 && self.eta < 0.5 * self.k_sq()) {
            return bad(format!("eta = {} must lie in (0, K²/2) with K² = {}", self.eta, self.k_sq()));
        }
        if self.n_max == 0 {
            return bad("n_max must be positive".into());
        }
        Ok(())
    }

    pub fn k_sq(&self) -> f64 {
        self.k_cut * self.k_cut
    }

    pub fn modes(&self) -> usize {
        mode_count(self.k_max)
    }

    /// Largest sector a cutoff charges, or `None` when its support is unbounded.
    pub fn charged_sectors(&self, cutoff: &CutoffProfile) -> Option<usize> {
        cutoff.support_max().map(|s| (s * self.tau).floor() as usize)
    }

    /// Checks that `n_max` reaches every sector the cutoff charges.
    pub fn check_truncation(&self, cutoff: &CutoffProfile) -> Result<()> {
        if let Some(top) = self.charged_sectors(cutoff) {
            if self.n_max < top {
                return Err(Error::InvalidConfig(format!(
                    "n_max = {} is below the last charged sector {top}",
                    self.n_max
                )));
            }
        }
        Ok(())
    }

    /// Whether `(τ, ε, η)` satisfy the asymptotic admissibility relations
    /// `1 > ε ≥ M (log τ)^{−1/2}` with `M = (2‖w‖²_∞+1)(K²+4)³` and `η ≥ τ^{−1/64}`.
    pub fn theorem_scale_admissible(&self) -> bool {
        if self.tau <= 1.0 {
            return false;
        }
        let w = self.kernel.sup_norm();
        let m = (2.0 * w * w + 1.0) * (self.k_sq() + 4.0).powi(3);
        self.eps < 1.0 && self.eps >= m / self.tau.ln().sqrt() && self.eta >= self.tau.powf(-1.0 / 64.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_cutoff_level() {
        let p = ModelParams::new(40.0, 0.5, 0.1, 0.6, 1).unwrap();
        assert_eq!(p.n_max, 14);
        assert_eq!(p.modes(), 3);
        assert_eq!(p.sector_cap, DEFAULT_SECTOR_CAP);
    }

    #[test]
    fn rejects_invalid_values() {
        assert!(ModelParams::new(0.0, 0.5, 0.1, 0.6, 1).is_err());
        assert!(ModelParams::new(10.0, 1.5, 0.1, 0.6, 1).is_err());
        assert!(ModelParams::new(10.0, 0.5, 0.2, 0.6, 1).is_err());
        assert!(ModelParams::new(10.0, 0.5, 0.1, -1.0, 1).is_err());
        assert!(ModelParams::new(10.0, 0.5, 0.1, 0.1, 1).is_err());
    }

    #[test]
    fn truncation_rule() {
        let p = ModelParams::new(40.0, 0.5, 0.1, 0.6, 1).unwrap();
        let f = CutoffProfile::smooth(0.6, 0.1).unwrap();
        assert!(p.check_truncation(&f).is_ok());
        let small = p.clone().with_n_max(10).unwrap();
        assert!(small.check_truncation(&f).is_err());
        assert!(small.check_truncation(&CutoffProfile::ConstantOne).is_ok());
    }

    #[test]
    fn admissibility_is_a_diagnostic_only() {
        let p = ModelParams::new(40.0, 0.5, 0.1, 0.6, 1).unwrap();
        assert!(!p.theorem_scale_admissible());
    }
}
