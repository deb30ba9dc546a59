use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::ladder::{apply, Ladder};
use crate::fock::{enumerate_sector, SectorBasis};
use crate::model::mode_count;

/// One particle-number block `Σ_a p_a |v_a⟩⟨v_a|` of a block-diagonal state.
#[derive(Debug, Clone)]
pub struct StateSector {
    basis: Arc<SectorBasis>,
    /// Orthonormal columns `v_a`; `None` means the occupation basis itself.
    vectors: Option<DMatrix<f64>>,
    weights: Vec<f64>,
}

impl StateSector {
    pub fn new(basis: Arc<SectorBasis>, vectors: Option<DMatrix<f64>>, weights: Vec<f64>) -> Result<Self> {
        let dim = basis.len();
        if weights.len() != dim {
            return Err(Error::InvalidConfig(format!(
                "sector {} expects {dim} weights, got {}",
                basis.n(),
                weights.len()
            )));
        }
        if let Some(v) = &vectors {
            if v.nrows() != dim || v.ncols() != dim {
                return Err(Error::InvalidConfig(format!(
                    "sector {} eigenvector matrix must be {dim}×{dim}",
                    basis.n()
                )));
            }
        }
        if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidConfig(format!("sector {} has negative or non-finite weights", basis.n())));
        }
        Ok(Self { basis, vectors, weights })
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn vectors(&self) -> Option<&DMatrix<f64>> {
        self.vectors.as_ref()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coefficients of `v_a` in the occupation basis.
    pub fn vector(&self, a: usize) -> DVector<f64> {
        match &self.vectors {
            Some(v) => v.column(a).into_owned(),
            None => {
                let mut e = DVector::zeros(self.dim());
                e[a] = 1.0;
                e
            }
        }
    }

    /// Dense sector block `Σ_a p_a v_a v_aᵀ`.
    pub fn density(&self) -> DMatrix<f64> {
        match &self.vectors {
            Some(v) => {
                let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, a| v[(i, a)] * self.weights[a]);
                scaled * v.transpose()
            }
            None => DMatrix::from_diagonal(&DVector::from_column_slice(&self.weights)),
        }
    }
}

/// Normalized block-diagonal density operator on the truncated Fock space.
#[derive(Debug, Clone)]
pub struct BlockState {
    k_max: usize,
    sectors: Vec<StateSector>,
}

impl BlockState {
    /// Sectors must be distinct, share the mode window and carry unit total weight.
    pub fn new(k_max: usize, mut sectors: Vec<StateSector>) -> Result<Self> {
        sectors.sort_by_key(|s| s.n());
        if sectors.windows(2).any(|w| w[0].n() == w[1].n()) {
            return Err(Error::InvalidConfig("duplicate particle sector in block state".into()));
        }
        if sectors.iter().any(|s| s.basis.k_max() != k_max) {
            return Err(Error::InvalidConfig("sector mode window differs from the state".into()));
        }
        let total: f64 = sectors.iter().map(|s| s.mass()).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!("block state has trace {total}, expected 1")));
        }
        Ok(Self { k_max, sectors })
    }

    pub fn vacuum(k_max: usize) -> Self {
        let basis = Arc::new(enumerate_sector(k_max, 0, 1).expect("vacuum sector"));
        Self { k_max, sectors: vec![StateSector { basis, vectors: None, weights: vec![1.0] }] }
    }

    /// Mixture of occupation basis states with the given probabilities.
    pub fn diagonal(k_max: usize, entries: &[(Vec<u32>, f64)]) -> Result<Self> {
        let mut by_sector: std::collections::BTreeMap<usize, Vec<(&[u32], f64)>> = Default::default();
        for (counts, p) in entries {
            if counts.len() != mode_count(k_max) {
                return Err(Error::InvalidConfig("occupation vector has the wrong number of modes".into()));
            }
            let n = counts.iter().map(|&c| c as usize).sum();
            by_sector.entry(n).or_default().push((counts, *p));
        }
        let mut sectors = Vec::new();
        for (n, list) in by_sector {
            let basis = Arc::new(enumerate_sector(k_max, n, usize::MAX)?);
            let mut weights = vec![0.0; basis.len()];
            for (counts, p) in list {
                weights[basis.index_of(counts).expect("counts belong to their sector")] += p;
            }
            sectors.push(StateSector::new(basis, None, weights)?);
        }
        Self::new(k_max, sectors)
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn modes(&self) -> usize {
        mode_count(self.k_max)
    }

    pub fn sectors(&self) -> &[StateSector] {
        &self.sectors
    }

    pub fn sector(&self, n: usize) -> Option<&StateSector> {
        self.sectors.binary_search_by_key(&n, |s| s.n()).ok().map(|i| &self.sectors[i])
    }

    pub fn trace(&self) -> f64 {
        self.sectors.iter().map(|s| s.mass()).sum()
    }

    /// Largest sector carrying positive weight.
    pub fn max_charged_sector(&self) -> usize {
        self.sectors.iter().filter(|s| s.mass() > 0.0).map(|s| s.n()).max().unwrap_or(0)
    }

    /// `Tr(g(𝒩) Γ)`.
    pub fn number_expectation<G: Fn(usize) -> f64>(&self, g: G) -> f64 {
        self.sectors.iter().map(|s| g(s.n()) * s.mass()).sum()
    }
}

/// `a_j v` for every mode `j`, as vectors over the `(n−1)`-sector basis.
pub(crate) fn annihilated(basis: &SectorBasis, lower: &SectorBasis, v: &DVector<f64>) -> Vec<DVector<f64>> {
    let modes = basis.modes();
    let mut out = vec![DVector::zeros(lower.len()); modes];
    let mut c = vec![0u32; modes];
    for (s, state) in basis.states().iter().enumerate() {
        if v[s] == 0.0 {
            continue;
        }
        for (j, w) in out.iter_mut().enumerate() {
            c.copy_from_slice(state.counts());
            let amp = apply(&mut c, j, Ladder::Annihilate);
            if amp != 0.0 {
                w[lower.index_of(&c).expect("lower sector")] += amp * v[s];
            }
        }
    }
    out
}

/// `a†_j v` for every mode `j`, as vectors over the `(n+1)`-sector basis.
pub(crate) fn created(basis: &SectorBasis, upper: &SectorBasis, v: &DVector<f64>) -> Vec<DVector<f64>> {
    let modes = basis.modes();
    let mut out = vec![DVector::zeros(upper.len()); modes];
    let mut c = vec![0u32; modes];
    for (s, state) in basis.states().iter().enumerate() {
        if v[s] == 0.0 {
            continue;
        }
        for (j, w) in out.iter_mut().enumerate() {
            c.copy_from_slice(state.counts());
            let amp = apply(&mut c, j, Ladder::Create);
            w[upper.index_of(&c).expect("upper sector")] += amp * v[s];
        }
    }
    out
}

/// One-body density matrix `Γ⁽¹⁾_{ij} = Tr(a†_j a_i Γ)`.
pub fn one_body_matrix(state: &BlockState) -> DMatrix<f64> {
    let modes = state.modes();
    let mut gamma = DMatrix::zeros(modes, modes);
    for sector in state.sectors() {
        if sector.n() == 0 {
            continue;
        }
        let basis = sector.basis();
        match sector.vectors() {
            None => {
                for (s, occ) in basis.states().iter().enumerate() {
                    for j in 0..modes {
                        gamma[(j, j)] += sector.weights()[s] * occ.counts()[j] as f64;
                    }
                }
            }
            Some(_) => {
                let lower = enumerate_sector(state.k_max(), sector.n() - 1, usize::MAX).expect("lower sector");
                let parts: Vec<DMatrix<f64>> = (0..sector.dim())
                    .into_par_iter()
                    .filter(|&a| sector.weights()[a] > 0.0)
                    .map(|a| {
                        let w = annihilated(basis, &lower, &sector.vector(a));
                        DMatrix::from_fn(modes, modes, |i, j| sector.weights()[a] * w[j].dot(&w[i]))
                    })
                    .collect();
                for p in parts {
                    gamma += p;
                }
            }
        }
    }
    gamma
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_has_zero_one_body_matrix() {
        let g = one_body_matrix(&BlockState::vacuum(1));
        assert_eq!(g.norm(), 0.0);
    }

    #[test]
    fn single_particle_in_zero_mode() {
        let s = BlockState::diagonal(0, &[(vec![1], 1.0)]).unwrap();
        let g = one_body_matrix(&s);
        assert_eq!(g[(0, 0)], 1.0);
        let s = BlockState::diagonal(1, &[(vec![0, 1, 0], 1.0)]).unwrap();
        let g = one_body_matrix(&s);
        assert_eq!(g[(1, 1)], 1.0);
        assert_eq!(g.sum(), 1.0);
    }

    #[test]
    fn thermal_single_mode_occupation() {
        // Untruncated geometric law with ratio e^{−λ₀/τ}, λ₀ = 1/2, τ = 10.
        let q = (-0.05f64).exp();
        let n_max = 1200;
        let entries: Vec<(Vec<u32>, f64)> = (0..=n_max).map(|n| (vec![n as u32], (1.0 - q) * q.powi(n))).collect();
        let total: f64 = entries.iter().map(|e| e.1).sum();
        let entries: Vec<_> = entries.into_iter().map(|(c, p)| (c, p / total)).collect();
        let g = one_body_matrix(&BlockState::diagonal(0, &entries).unwrap());
        let oracle = 1.0 / (0.05f64.exp() - 1.0);
        assert!((g[(0, 0)] - oracle).abs() < 1e-9);
        assert!((g[(0, 0)] - 19.5042).abs() < 1e-4);
    }

    #[test]
    fn rotated_vectors_match_dense_trace() {
        let basis = Arc::new(enumerate_sector(1, 2, 100).unwrap());
        let dim = basis.len();
        // Orthonormal basis from a deterministic symmetric matrix.
        let m = DMatrix::from_fn(dim, dim, |i, j| ((i * 7 + j * 3) % 5) as f64 + ((i + j) % 2) as f64);
        let sym = &m + m.transpose();
        let (_, vectors) = crate::linalg::symmetric_eigen(&sym).unwrap();
        let weights: Vec<f64> = (0..dim).map(|a| (a + 1) as f64).collect();
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let sector = StateSector::new(basis.clone(), Some(vectors), weights).unwrap();
        let state = BlockState::new(1, vec![sector.clone()]).unwrap();
        let g = one_body_matrix(&state);
        // Dense route: Tr(a†_j a_i ρ) with explicit ladder matrices.
        let lower = enumerate_sector(1, 1, 100).unwrap();
        let rho = sector.density();
        for i in 0..3 {
            for j in 0..3 {
                let ai = crate::fock::ladder_matrix(&basis, &lower, i, Ladder::Annihilate).unwrap();
                let aj = crate::fock::ladder_matrix(&basis, &lower, j, Ladder::Annihilate).unwrap();
                let v = (aj.transpose() * ai * &rho).trace();
                assert!((g[(i, j)] - v).abs() < 1e-12);
            }
        }
        assert!((g.trace() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized() {
        let basis = Arc::new(enumerate_sector(0, 1, 10).unwrap());
        let s = StateSector::new(basis, None, vec![0.5]).unwrap();
        assert!(BlockState::new(0, vec![s]).is_err());
    }
}
