use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use statrs::function::gamma::gamma_lr;

use crate::error::{Error, Result};
use crate::fock::{enumerate_sector, BlockState, SectorBasis};

/// Poisson tail tolerance used when no truncation is requested.
pub const COHERENT_TAIL_TOL: f64 = 1e-12;

/// `P(X > n)` for `X ~ Poisson(mean)`.
pub fn poisson_tail(mean: f64, n: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    gamma_lr(n as f64 + 1.0, mean)
}

/// `P(X = n)` for `X ~ Poisson(mean)`.
pub fn poisson_pmf(mean: f64, n: usize) -> f64 {
    if mean <= 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * mean.ln() - mean - statrs::function::gamma::ln_gamma(n as f64 + 1.0)).exp()
}

/// Smallest `N` with `P(Poisson(mean) > N) < tol`.
pub fn poisson_truncation(mean: f64, tol: f64) -> usize {
    let mut n = mean.floor() as usize;
    while poisson_tail(mean, n) >= tol {
        n += 1;
    }
    while n > 0 && poisson_tail(mean, n - 1) < tol {
        n -= 1;
    }
    n
}

/// Table of `z_j^m/√(m!)` for `m ≤ n_max`, built by the stable recursion in `m`.
pub(crate) fn power_table(z: &[Complex64], n_max: usize) -> Vec<Vec<Complex64>> {
    z.iter()
        .map(|&zj| {
            let mut row = Vec::with_capacity(n_max + 1);
            row.push(Complex64::new(1.0, 0.0));
            for m in 1..=n_max {
                let prev = row[m - 1];
                row.push(prev * zj / (m as f64).sqrt());
            }
            row
        })
        .collect()
}

/// `Π_j z_j^{m_j}/√(m_j!)` for every occupation vector of `basis`.
pub(crate) fn sector_monomials(basis: &SectorBasis, table: &[Vec<Complex64>]) -> Vec<Complex64> {
    basis.states().iter().map(|occ| occ.counts().iter().zip(table).map(|(&m, row)| row[m as usize]).product()).collect()
}

/// Fock amplitudes `e^{−‖u‖²/(2ς)} (u/√ς)^{⊗n}/√(n!)` of a coherent state, kept up to a
/// truncation sector, in the occupation basis of each sector.
#[derive(Debug, Clone)]
pub struct CoherentVector {
    field: Vec<Complex64>,
    scale: f64,
    n_trunc: usize,
    sectors: Vec<(Arc<SectorBasis>, Vec<Complex64>)>,
    deficit: f64,
}

impl CoherentVector {
    pub fn field(&self) -> &[Complex64] {
        &self.field
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    /// Poisson weight lost beyond the truncation sector.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    /// Poisson mean `‖u‖²/ς`.
    pub fn mean(&self) -> f64 {
        self.field.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.scale
    }

    pub fn sector(&self, n: usize) -> Option<(&Arc<SectorBasis>, &[Complex64])> {
        self.sectors.get(n).map(|(b, a)| (b, a.as_slice()))
    }

    pub fn sector_weight(&self, n: usize) -> f64 {
        self.sector(n).map_or(0.0, |(_, a)| a.iter().map(|c| c.norm_sqr()).sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        (0..=self.n_trunc).map(|n| self.sector_weight(n)).sum()
    }
}

/// Coherent state at field `u` (window coefficients) and scale `ς`, truncated at `n_trunc`
/// or, when `None`, at the smallest sector whose Poisson tail is below [`COHERENT_TAIL_TOL`].
pub fn coherent_vector(field: &[Complex64], scale: f64, n_trunc: Option<usize>) -> Result<CoherentVector> {
    if field.len().is_multiple_of(2) {
        return Err(Error::InvalidConfig("field must carry an odd number of modes".into()));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidConfig(format!("coherent scale must be positive, got {scale}")));
    }
    let k_max = (field.len() - 1) / 2;
    let z: Vec<Complex64> = field.iter().map(|c| c / scale.sqrt()).collect();
    let mean: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let n_trunc = n_trunc.unwrap_or_else(|| poisson_truncation(mean, COHERENT_TAIL_TOL));
    let table = power_table(&z, n_trunc);
    let pre = (-0.5 * mean).exp();
    let sectors = (0..=n_trunc)
        .map(|n| {
            let basis = Arc::new(enumerate_sector(k_max, n, usize::MAX)?);
            let amps = sector_monomials(&basis, &table).into_iter().map(|a| a * pre).collect();
            Ok((basis, amps))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherentVector { field: field.to_vec(), scale, n_trunc, sectors, deficit: poisson_tail(mean, n_trunc) })
}

struct HusimiSector {
    basis: Arc<SectorBasis>,
    /// Eigenvectors transposed, so rows are `v_aᵀ`.
    rows: Option<nalgebra::DMatrix<f64>>,
    weights: Vec<f64>,
}

/// Exact evaluation of the lower symbol `(ςπ)^{−J}⟨ξ(u/√ς), Γ ξ(u/√ς)⟩` of a block state.
pub struct HusimiEvaluator {
    scale: f64,
    modes: usize,
    top: usize,
    sectors: Vec<HusimiSector>,
}

impl HusimiEvaluator {
    pub fn new(state: &BlockState, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidConfig(format!("Husimi scale must be positive, got {scale}")));
        }
        let sectors: Vec<HusimiSector> = state
            .sectors()
            .iter()
            .filter(|s| s.mass() > 0.0)
            .map(|s| HusimiSector {
                basis: s.basis().clone(),
                rows: s.vectors().map(|v| v.transpose()),
                weights: s.weights().to_vec(),
            })
            .collect();
        Ok(Self { scale, modes: state.modes(), top: state.max_charged_sector(), sectors })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `log` of the density with the Gaussian factor `e^{−‖u‖²/ς}` split off, so that
    /// the density is `exp(−‖u‖²/ς + value)`.
    fn log_polynomial(&self, u: &[Complex64]) -> f64 {
        let z: Vec<Complex64> = u.iter().map(|c| c / self.scale.sqrt()).collect();
        let table = power_table(&z, self.top);
        let mut total = 0.0;
        for s in &self.sectors {
            let amps = sector_monomials(&s.basis, &table);
            total += match &s.rows {
                None => amps.iter().zip(&s.weights).map(|(a, p)| p * a.norm_sqr()).sum::<f64>(),
                Some(rows) => {
                    let re = DVector::from_iterator(amps.len(), amps.iter().map(|a| a.re));
                    let im = DVector::from_iterator(amps.len(), amps.iter().map(|a| a.im));
                    let (or, oi) = (rows * re, rows * im);
                    (0..s.weights.len()).map(|a| s.weights[a] * (or[a] * or[a] + oi[a] * oi[a])).sum()
                }
            };
        }
        total.ln() - self.modes as f64 * (self.scale * PI).ln()
    }

    pub fn log_density(&self, u: &[Complex64]) -> f64 {
        let r: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.scale;
        self.log_polynomial(u) - r
    }

    pub fn density(&self, u: &[Complex64]) -> f64 {
        self.log_density(u).exp()
    }
}

/// Husimi density `(ςπ)^{−J}⟨ξ(u/√ς), Γ ξ(u/√ς)⟩` of a block state at `u`.
pub fn husimi_density(state: &BlockState, scale: f64, u: &[Complex64]) -> Result<f64> {
    if u.len() != state.modes() {
        return Err(Error::InvalidConfig("field and state have different windows".into()));
    }
    Ok(HusimiEvaluator::new(state, scale)?.density(u))
}
