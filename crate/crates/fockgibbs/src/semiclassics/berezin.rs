use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal, WeightedIndex};
use statrs::function::gamma::ln_gamma;

use crate::cgibbs::{free_scales, sharded_accumulate, sharded_fold, MCEstimate, MassLaw, RatioMoments};
use crate::error::{Error, Result};
use crate::fock::{sector_dimension, BlockState};
use crate::model::{eigenvalue, mode_of_index, CutoffProfile, ModelParams};
use crate::qgibbs::relative_entropy;
use crate::semiclassics::coherent::HusimiEvaluator;

/// Exact sampler for the Husimi measure of a block state by rejection from the envelope
/// `(ςπ)^{−J} Σ_n m_n e^{−r} rⁿ/n!`, `r = ‖u‖²/ς`, where `m_n` is the largest eigenvalue
/// of the state on sector `n`.
pub struct HusimiSampler {
    evaluator: HusimiEvaluator,
    scale: f64,
    modes: usize,
    sectors: Vec<(usize, f64)>,
    pick: WeightedIndex<f64>,
}

impl HusimiSampler {
    pub fn new(state: &BlockState, scale: f64) -> Result<Self> {
        let evaluator = HusimiEvaluator::new(state, scale)?;
        let sectors: Vec<(usize, f64)> = state
            .sectors()
            .iter()
            .filter(|s| s.mass() > 0.0)
            .map(|s| (s.n(), s.weights().iter().cloned().fold(0.0, f64::max)))
            .collect();
        let masses: Vec<f64> = sectors.iter().map(|&(n, m)| m * sector_dimension(state.k_max(), n) as f64).collect();
        let pick = WeightedIndex::new(&masses).map_err(|e| Error::InvalidConfig(format!("empty state: {e}")))?;
        Ok(Self { evaluator, scale, modes: state.modes(), sectors, pick })
    }

    pub fn evaluator(&self) -> &HusimiEvaluator {
        &self.evaluator
    }

    fn log_envelope(&self, u: &[Complex64]) -> f64 {
        let r: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.scale;
        let poly: f64 = self
            .sectors
            .iter()
            .map(|&(n, m)| if n == 0 { m } else { m * (n as f64 * r.ln() - ln_gamma(n as f64 + 1.0)).exp() })
            .sum();
        poly.ln() - r - self.modes as f64 * (self.scale * PI).ln()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        loop {
            let (n, _) = self.sectors[self.pick.sample(rng)];
            let radius = Gamma::new((n + self.modes) as f64, 1.0).expect("positive shape").sample(rng);
            let dir: Vec<f64> = (0..2 * self.modes).map(|_| rng.sample(StandardNormal)).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            let s = (self.scale * radius).sqrt() / norm;
            let u: Vec<Complex64> = dir.chunks(2).map(|p| Complex64::new(p[0] * s, p[1] * s)).collect();
            let accept = (self.evaluator.log_density(&u) - self.log_envelope(&u)).exp();
            if rng.gen::<f64>() < accept {
                return u;
            }
        }
    }
}

/// Classical relative entropy of the two Husimi measures with its standard error, and the
/// quantum relative entropy it must not exceed.
#[derive(Debug, Clone, Copy)]
pub struct BerezinLiebReport {
    pub classical: MCEstimate,
    pub quantum: f64,
}

impl BerezinLiebReport {
    pub fn holds(&self) -> bool {
        self.classical.value <= self.quantum + 3.0 * self.classical.stderr
    }
}

/// Samples the Husimi measure of `gamma` and averages the log ratio of the two lower symbols.
pub fn berezin_lieb_check(
    gamma: &BlockState,
    reference: &BlockState,
    scale: f64,
    n_samples: u64,
    seed: u64,
) -> Result<BerezinLiebReport> {
    let quantum = relative_entropy(gamma, reference)?;
    if n_samples < 2 {
        return Err(Error::InvalidConfig("at least two samples are required".into()));
    }
    let sampler = HusimiSampler::new(gamma, scale)?;
    let other = HusimiEvaluator::new(reference, scale)?;
    let acc = sharded_fold(
        n_samples,
        seed,
        || RatioMoments::new(1),
        |rng, _, acc| {
            let u = sampler.sample(rng);
            acc.push(1.0, &[sampler.evaluator().log_density(&u) - other.log_density(&u)]);
        },
    );
    let classical = acc.ratio(0, seed);
    if !classical.value.is_finite() {
        return Err(Error::NumericalFailure("reference symbol vanished on a sample".into()));
    }
    Ok(BerezinLiebReport { classical, quantum })
}

/// `‖μ^{1/τ}_Γ − μ^f_0‖_{L¹}` between the Husimi measure of `state` at scale `1/τ` and the
/// cutoff-normalized free measure `f(‖u‖²)dμ₀/∫f dμ₀`, by sampling `μ₀`.
pub fn husimi_l1_distance(
    state: &BlockState,
    params: &ModelParams,
    cutoff: &CutoffProfile,
    n_samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    let husimi = HusimiEvaluator::new(state, 1.0 / params.tau)?;
    let z = MassLaw::new(params.k_max).cutoff_expectation(cutoff)?;
    let rates: Vec<f64> = (0..params.modes()).map(|j| eigenvalue(mode_of_index(j, params.k_max))).collect();
    let log_norm: f64 = rates.iter().map(|l| (l / PI).ln()).sum();
    let acc = sharded_accumulate(
        &free_scales(params.k_max),
        n_samples,
        seed,
        || RatioMoments::new(1),
        |u, acc| {
            let quad: f64 = u.coeffs.iter().zip(&rates).map(|(c, l)| l * c.norm_sqr()).sum();
            let ratio = (husimi.log_density(&u.coeffs) - log_norm + quad).exp();
            acc.push(1.0, &[(ratio - cutoff.eval(u.mass) / z).abs()]);
        },
    );
    Ok(acc.ratio(0, seed))
}
