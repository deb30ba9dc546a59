use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    assemble_interaction, assemble_kinetic, enumerate_sector, sector_dimension, BlockState, SectorBasis, StateSector,
};
use crate::linalg::symmetric_eigen;
use crate::model::{CutoffProfile, ModelParams};
use crate::qgibbs::free::{log_free_partition, log_free_partition_exact, log_free_sector_traces, log_sum_exp};

/// Eigendecomposition of the Hamiltonian on one sector.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub basis: Arc<SectorBasis>,
    pub energies: Vec<f64>,
    /// Eigenvectors as columns, `None` when the occupation basis diagonalizes the sector.
    pub vectors: Option<DMatrix<f64>>,
}

#[derive(Debug, Clone)]
pub struct GibbsSector {
    pub n: usize,
    pub cutoff_value: f64,
    /// `log Tr e^{−ℍ_τ}` restricted to the sector.
    pub log_trace: f64,
    /// Present whenever the sector fits under the dimension cap.
    pub spectrum: Option<SectorSpectrum>,
}

/// Block-diagonal `e^{−ℍ_τ} f(𝒩/τ)` with its normalization.
#[derive(Debug, Clone)]
pub struct GibbsStateBlocks {
    pub params: ModelParams,
    pub interacting: bool,
    pub cutoff: CutoffProfile,
    pub sectors: Vec<GibbsSector>,
    log_z: f64,
}

/// `ℍ_τ = dΓ(h)/τ − 𝕎/τ³` on sector `n`.
pub fn sector_hamiltonian(params: &ModelParams, basis: &SectorBasis, interacting: bool) -> DMatrix<f64> {
    let mut h = assemble_kinetic(basis).matrix / params.tau;
    if interacting && basis.n() >= 3 {
        h -= assemble_interaction(basis, &params.kernel, params.eps).matrix / params.tau.powi(3);
    }
    h
}

fn check_eigenpairs(h: &DMatrix<f64>, values: &DVector<f64>, vectors: &DMatrix<f64>, n: usize) -> Result<()> {
    let dim = h.nrows();
    let scale = h.norm().max(f64::MIN_POSITIVE);
    if values.iter().any(|e| !e.is_finite()) {
        return Err(Error::NumericalFailure(format!("non-finite eigenvalue in sector {n}")));
    }
    // Five spread-out eigenpairs; the spread is deterministic so reruns agree.
    for t in 0..5.min(dim) {
        let a = (t * 7919 + n * 104_729) % dim;
        let v = vectors.column(a);
        let r = (h * v - v * values[a]).norm();
        if r > 1e-9 * scale {
            return Err(Error::NumericalFailure(format!("eigenpair residual {r:.3e} in sector {n}")));
        }
    }
    Ok(())
}

fn build_sector(params: &ModelParams, interacting: bool, n: usize, f: f64, free_log_trace: f64) -> Result<GibbsSector> {
    let dim = sector_dimension(params.k_max, n);
    let needs_interaction = interacting && n >= 3;
    if dim > params.sector_cap {
        if needs_interaction {
            return Err(Error::ResourceLimit { dim, cap: params.sector_cap });
        }
        return Ok(GibbsSector { n, cutoff_value: f, log_trace: free_log_trace, spectrum: None });
    }
    let basis = Arc::new(enumerate_sector(params.k_max, n, params.sector_cap)?);
    if !needs_interaction {
        let energies: Vec<f64> = assemble_kinetic(&basis).matrix.diagonal().iter().map(|e| e / params.tau).collect();
        let log_trace = log_sum_exp(energies.iter().map(|e| -e));
        return Ok(GibbsSector {
            n,
            cutoff_value: f,
            log_trace,
            spectrum: Some(SectorSpectrum { basis, energies, vectors: None }),
        });
    }
    let h = sector_hamiltonian(params, &basis, true);
    let (values, vectors) = symmetric_eigen(&h)?;
    check_eigenpairs(&h, &values, &vectors, n)?;
    let energies: Vec<f64> = values.iter().cloned().collect();
    let log_trace = log_sum_exp(energies.iter().map(|e| -e));
    Ok(GibbsSector {
        n,
        cutoff_value: f,
        log_trace,
        spectrum: Some(SectorSpectrum { basis, energies, vectors: Some(vectors) }),
    })
}

/// Builds the Gibbs state `e^{−ℍ_τ} f(𝒩/τ)/𝒵` on sectors `0..=n_max`; sectors with
/// `f(n/τ) = 0` are excluded. Free sectors above the cap keep only their trace.
pub fn build_gibbs(params: &ModelParams, interacting: bool, cutoff: &CutoffProfile) -> Result<GibbsStateBlocks> {
    params.validate()?;
    params.check_truncation(cutoff)?;
    let free_traces = log_free_sector_traces(params.k_max, params.tau, params.n_max);
    let charged: Vec<(usize, f64)> =
        (0..=params.n_max).map(|n| (n, cutoff.eval(n as f64 / params.tau))).filter(|&(_, f)| f > 0.0).collect();
    let sectors: Vec<GibbsSector> = charged
        .par_iter()
        .map(|&(n, f)| build_sector(params, interacting, n, f, free_traces[n]))
        .collect::<Result<_>>()?;
    if sectors.is_empty() {
        return Err(Error::InvalidConfig("cutoff charges no sector up to n_max".into()));
    }
    let log_z = log_sum_exp(sectors.iter().map(|s| s.log_trace + s.cutoff_value.ln()));
    Ok(GibbsStateBlocks { params: params.clone(), interacting, cutoff: cutoff.clone(), sectors, log_z })
}

impl GibbsStateBlocks {
    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    pub fn partition_function(&self) -> f64 {
        self.log_z.exp()
    }

    /// Probability of each retained sector.
    pub fn sector_masses(&self) -> Vec<(usize, f64)> {
        self.sectors.iter().map(|s| (s.n, (s.log_trace + s.cutoff_value.ln() - self.log_z).exp())).collect()
    }

    /// `Tr((𝒩/τ)^ℓ Γ)`.
    pub fn particle_moment(&self, ell: u32) -> f64 {
        let masses = self.sector_masses();
        let total: f64 = masses.iter().map(|m| m.1).sum();
        masses.iter().map(|&(n, m)| (n as f64 / self.params.tau).powi(ell as i32) * m).sum::<f64>() / total
    }

    /// Normalized block state `Σ p_a |v_a⟩⟨v_a|`; fails when a charged sector was kept trace-only.
    pub fn state(&self) -> Result<BlockState> {
        let mut out = Vec::with_capacity(self.sectors.len());
        for s in &self.sectors {
            let spec = s.spectrum.as_ref().ok_or(Error::ResourceLimit {
                dim: sector_dimension(self.params.k_max, s.n),
                cap: self.params.sector_cap,
            })?;
            let shift = s.cutoff_value.ln() - self.log_z;
            let weights: Vec<f64> = spec.energies.iter().map(|e| (shift - e).exp()).collect();
            out.push(StateSector::new(spec.basis.clone(), spec.vectors.clone(), weights)?);
        }
        let total: f64 = out.iter().map(|s| s.mass()).sum();
        // Rescale the rounding residue so the trace is one to machine precision.
        let out = out
            .into_iter()
            .map(|s| {
                let w = s.weights().iter().map(|w| w / total).collect();
                StateSector::new(s.basis().clone(), s.vectors().cloned(), w)
            })
            .collect::<Result<Vec<_>>>()?;
        BlockState::new(self.params.k_max, out)
    }
}

/// `Tr(e^{−ℍ_τ} f(𝒩/τ)) / 𝒵_{τ,0}` with the cutoff-free free partition function in the
/// denominator, summed up to a certified tail below `1e−12`.
pub fn relative_partition(params: &ModelParams, interacting: bool, cutoff: &CutoffProfile) -> Result<f64> {
    let num = build_gibbs(params, interacting, cutoff)?.log_partition();
    let den = log_free_partition(params.k_max, params.tau, &CutoffProfile::ConstantOne);
    Ok((num - den).exp())
}

/// `𝒵^f_τ / 𝒵^f_{τ,0}`: interacting over free partition function, both with the cutoff.
pub fn cutoff_relative_partition(params: &ModelParams, cutoff: &CutoffProfile) -> Result<f64> {
    let num = build_gibbs(params, true, cutoff)?.log_partition();
    let den = log_free_partition(params.k_max, params.tau, cutoff);
    Ok((num - den).exp())
}

/// Exact `log Π(1 − e^{−λ_j/τ})^{−1}` for cross-checks.
pub fn log_free_partition_product(params: &ModelParams) -> f64 {
    log_free_partition_exact(params.k_max, params.tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qgibbs::free::{free_ratios, free_reference_cutoff};

    fn params(tau: f64, k_max: usize, n_max: usize) -> ModelParams {
        ModelParams::new(tau, 0.5, 0.1, 0.6, k_max).unwrap().with_n_max(n_max).unwrap()
    }

    #[test]
    fn free_single_mode_geometric() {
        let p = params(10.0, 0, 400);
        let g = build_gibbs(&p, false, &CutoffProfile::ConstantOne).unwrap();
        let oracle = 1.0 / (1.0 - (-0.05f64).exp());
        let tail = (-0.05f64 * 401.0).exp();
        assert!((g.partition_function() - oracle).abs() <= oracle * tail * 1.01);
        assert!((g.partition_function() - 20.5042).abs() < 1e-3);
        assert!((g.particle_moment(1) - 1.95042).abs() < 1e-4);
        assert_eq!(g.particle_moment(0), 1.0);
    }

    #[test]
    fn free_three_modes_product_formula() {
        let tau = 10.0;
        let n = free_reference_cutoff(1, tau, 1e-14);
        let p = params(tau, 1, n);
        let g = build_gibbs(&p, false, &CutoffProfile::ConstantOne).unwrap();
        let oracle: f64 = free_ratios(1, tau).iter().map(|q| 1.0 / (1.0 - q)).product();
        assert!((g.partition_function() - oracle).abs() < 1e-10 * oracle);
        assert!(g.sectors.iter().any(|s| s.spectrum.is_none()));
        assert!(matches!(g.state(), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn no_interaction_below_three_particles() {
        let p = params(10.0, 1, 2);
        let free = build_gibbs(&p, false, &CutoffProfile::ConstantOne).unwrap();
        let inter = build_gibbs(&p, true, &CutoffProfile::ConstantOne).unwrap();
        assert_eq!(free.log_partition(), inter.log_partition());
        for (a, b) in free.sectors.iter().zip(&inter.sectors) {
            assert_eq!(a.spectrum.as_ref().unwrap().energies, b.spectrum.as_ref().unwrap().energies);
            assert!(b.spectrum.as_ref().unwrap().vectors.is_none());
        }
    }

    #[test]
    fn relative_partition_trivial_cases() {
        let p = params(10.0, 1, free_reference_cutoff(1, 10.0, 1e-13));
        let r = relative_partition(&p, false, &CutoffProfile::ConstantOne).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let q = params(10.0, 1, 3);
        let sharp = CutoffProfile::sharp(0.6).unwrap();
        let r = relative_partition(&q, false, &sharp).unwrap();
        assert!(r > 0.0 && r < 1.0);
    }

    #[test]
    fn exact_truncation_is_bit_identical() {
        let base = ModelParams::new(20.0, 0.5, 0.1, 0.6, 1).unwrap();
        let cutoff = CutoffProfile::smooth(0.6, 0.1).unwrap();
        let a = build_gibbs(&base, true, &cutoff).unwrap().log_partition();
        let wider = base.clone().with_n_max(base.n_max + 10).unwrap();
        let b = build_gibbs(&wider, true, &cutoff).unwrap().log_partition();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn interacting_state_is_normalized_and_attractive() {
        let p = ModelParams::new(20.0, 0.5, 0.1, 0.6, 1).unwrap();
        let cutoff = CutoffProfile::smooth(0.6, 0.1).unwrap();
        let g = build_gibbs(&p, true, &cutoff).unwrap();
        let s = g.state().unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-12);
        let r = cutoff_relative_partition(&p, &cutoff).unwrap();
        assert!(r > 1.0);
    }

    #[test]
    fn truncation_rule_enforced() {
        let p = ModelParams::new(20.0, 0.5, 0.1, 0.6, 1).unwrap().with_n_max(3).unwrap();
        assert!(build_gibbs(&p, true, &CutoffProfile::smooth(0.6, 0.1).unwrap()).is_err());
    }
}
