use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{annihilated, assemble_interaction, enumerate_sector, one_body_matrix, BlockState};
use crate::model::ModelParams;

/// Reduced density matrix `Γ⁽ᵏ⁾` on the tensor basis `(i₁,…,i_k) ↦ i₁J^{k−1}+…+i_k`,
/// with entries `(1/k!) Tr(a†_{j₁}⋯a†_{j_k} a_{i_k}⋯a_{i₁} Γ)`; `scale_tau` multiplies by `k!/τᵏ`.
pub fn reduced_density_matrix(state: &BlockState, k: usize, scale_tau: Option<f64>) -> Result<DMatrix<f64>> {
    let (mut gamma, factorial) = match k {
        1 => (one_body_matrix(state), 1.0),
        2 => (two_body_matrix(state), 2.0),
        _ => return Err(Error::UnsupportedOrder(k)),
    };
    gamma /= factorial;
    if let Some(tau) = scale_tau {
        gamma *= factorial / tau.powi(k as i32);
    }
    Ok(gamma)
}

/// `Tr(a†_{j₁}a†_{j₂} a_{i₂}a_{i₁} Γ)` indexed by `(i₁J+i₂, j₁J+j₂)`.
fn two_body_matrix(state: &BlockState) -> DMatrix<f64> {
    let modes = state.modes();
    let size = modes * modes;
    let mut gamma = DMatrix::zeros(size, size);
    for sector in state.sectors().iter().filter(|s| s.n() >= 2) {
        let lower = enumerate_sector(state.k_max(), sector.n() - 1, usize::MAX).expect("lower sector");
        let lowest = enumerate_sector(state.k_max(), sector.n() - 2, usize::MAX).expect("lowest sector");
        let parts: Vec<DMatrix<f64>> = (0..sector.dim())
            .into_par_iter()
            .filter(|&a| sector.weights()[a] > 0.0)
            .map(|a| {
                let once = annihilated(sector.basis(), &lower, &sector.vector(a));
                let mut twice: Vec<DVector<f64>> = Vec::with_capacity(size);
                for i1 in 0..modes {
                    let inner = annihilated(&lower, &lowest, &once[i1]);
                    twice.extend(inner);
                }
                let p = sector.weights()[a];
                DMatrix::from_fn(size, size, |r, c| p * twice[c].dot(&twice[r]))
            })
            .collect();
        for p in parts {
            gamma += p;
        }
    }
    gamma
}

/// `Γ⁽¹⁾` through the partial trace `n Tr_{2..n}|Ψ⟩⟨Ψ|` of each eigenvector written as a
/// symmetric tensor in `𝔥^{⊗n}`; limited to `Jⁿ ≤ 2²⁰`.
pub fn one_body_partial_trace(state: &BlockState) -> Result<DMatrix<f64>> {
    let modes = state.modes();
    let mut gamma = DMatrix::zeros(modes, modes);
    for sector in state.sectors().iter().filter(|s| s.n() >= 1) {
        let n = sector.n();
        let size = (modes as f64).powi(n as i32);
        if size > (1u64 << 20) as f64 {
            return Err(Error::ResourceLimit { dim: size as usize, cap: 1 << 20 });
        }
        let size = size as usize;
        let rest = size / modes;
        let fact = |m: u32| (1..=m).map(|i| i as f64).product::<f64>();
        let n_fact = fact(n as u32);
        // For every tensor index, the occupation index and the symmetrization amplitude.
        let mut slots = Vec::with_capacity(size);
        let mut digits = vec![0usize; n];
        let mut counts = vec![0u32; modes];
        for idx in 0..size {
            let mut r = idx;
            for d in digits.iter_mut().rev() {
                *d = r % modes;
                r /= modes;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            for &d in &digits {
                counts[d] += 1;
            }
            let amp = (counts.iter().map(|&c| fact(c)).product::<f64>() / n_fact).sqrt();
            slots.push((sector.basis().index_of(&counts).expect("occupation in sector"), amp));
        }
        for a in 0..sector.dim() {
            let p = sector.weights()[a];
            if p == 0.0 {
                continue;
            }
            let v = sector.vector(a);
            let psi: Vec<f64> = slots.iter().map(|&(s, amp)| v[s] * amp).collect();
            for i in 0..modes {
                for j in 0..modes {
                    let mut acc = 0.0;
                    for r in 0..rest {
                        acc += psi[j * rest + r] * psi[i * rest + r];
                    }
                    gamma[(i, j)] += p * n as f64 * acc;
                }
            }
        }
    }
    Ok(gamma)
}

/// Quantum relative entropy `Tr Γ(log Γ − log Γ′)` of two block states on the same window.
pub fn relative_entropy(gamma: &BlockState, reference: &BlockState) -> Result<f64> {
    if gamma.k_max() != reference.k_max() {
        return Err(Error::SupportMismatch("states live on different mode windows".into()));
    }
    let mut total = 0.0;
    for s in gamma.sectors() {
        if s.mass() == 0.0 {
            continue;
        }
        let r = reference
            .sector(s.n())
            .filter(|r| r.mass() > 0.0)
            .ok_or_else(|| Error::SupportMismatch(format!("reference vanishes on charged sector {}", s.n())))?;
        // Overlaps |⟨v_a, v′_b⟩|² between the two eigenbases.
        let overlap: DMatrix<f64> = match (s.vectors(), r.vectors()) {
            (None, None) => DMatrix::identity(s.dim(), s.dim()),
            (Some(v), None) => v.transpose(),
            (None, Some(w)) => w.clone(),
            (Some(v), Some(w)) => v.transpose() * w,
        };
        for a in 0..s.dim() {
            let p = s.weights()[a];
            if p == 0.0 {
                continue;
            }
            let mut cross = 0.0;
            for b in 0..r.dim() {
                let o = overlap[(a, b)] * overlap[(a, b)];
                if o == 0.0 {
                    continue;
                }
                let q = r.weights()[b];
                if q == 0.0 {
                    if o > 1e-14 {
                        return Err(Error::SupportMismatch(format!(
                            "reference kernel meets the support in sector {}",
                            s.n()
                        )));
                    }
                    continue;
                }
                cross += o * q.ln();
            }
            total += p * (p.ln() - cross);
        }
    }
    Ok(total)
}

/// `Tr[𝕎 Γ]` for the unscaled second-quantized interaction.
pub fn interaction_expectation(state: &BlockState, params: &ModelParams) -> f64 {
    state
        .sectors()
        .iter()
        .filter(|s| s.n() >= 3 && s.mass() > 0.0)
        .map(|s| {
            let w = assemble_interaction(s.basis(), &params.kernel, params.eps).matrix;
            (w * s.density()).trace()
        })
        .sum()
}

/// Gibbs free-energy functional `ℋ(Γ, Γ_ref) − Tr[𝕎 Γ]/τ³`.
pub fn variational_functional(state: &BlockState, reference: &BlockState, params: &ModelParams) -> Result<f64> {
    Ok(relative_entropy(state, reference)? - interaction_expectation(state, params) / params.tau.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::StateSector;
    use std::sync::Arc;

    #[test]
    fn two_level_kl() {
        let a = BlockState::diagonal(0, &[(vec![0], 0.7), (vec![1], 0.3)]).unwrap();
        let b = BlockState::diagonal(0, &[(vec![0], 0.5), (vec![1], 0.5)]).unwrap();
        let h = relative_entropy(&a, &b).unwrap();
        let oracle = 0.7 * (1.4f64).ln() + 0.3 * (0.6f64).ln();
        assert!((h - oracle).abs() < 1e-15);
        assert!((h - 0.082282).abs() < 1e-6);
        assert_eq!(relative_entropy(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn support_mismatch_detected() {
        let a = BlockState::diagonal(0, &[(vec![0], 0.5), (vec![2], 0.5)]).unwrap();
        let b = BlockState::diagonal(0, &[(vec![0], 0.5), (vec![1], 0.5)]).unwrap();
        assert!(matches!(relative_entropy(&a, &b), Err(Error::SupportMismatch(_))));
    }

    #[test]
    fn unsupported_order() {
        assert!(matches!(reduced_density_matrix(&BlockState::vacuum(0), 3, None), Err(Error::UnsupportedOrder(3))));
    }

    #[test]
    fn vacuum_reduced_matrices_vanish() {
        for k in 1..=2 {
            let g = reduced_density_matrix(&BlockState::vacuum(1), k, None).unwrap();
            assert_eq!(g.norm(), 0.0);
        }
    }

    fn rotated_state() -> BlockState {
        let mut sectors = Vec::new();
        let mut weights_total = 0.0;
        let mut raw = Vec::new();
        for n in 0..=4 {
            let basis = Arc::new(enumerate_sector(1, n, 100).unwrap());
            let dim = basis.len();
            let m = DMatrix::from_fn(dim, dim, |i, j| (((i + 1) * (j + 2) * (n + 3)) % 7) as f64 - 3.0);
            let (_, vectors) = crate::linalg::symmetric_eigen(&(&m + m.transpose())).unwrap();
            let w: Vec<f64> = (0..dim).map(|a| 1.0 / (1.0 + a as f64 + n as f64)).collect();
            weights_total += w.iter().sum::<f64>();
            raw.push((basis, vectors, w));
        }
        for (basis, v, w) in raw {
            let w = w.iter().map(|x| x / weights_total).collect();
            sectors.push(StateSector::new(basis, Some(v), w).unwrap());
        }
        BlockState::new(1, sectors).unwrap()
    }

    #[test]
    fn ladder_and_partial_trace_routes_agree() {
        let s = rotated_state();
        let ladder = one_body_matrix(&s);
        let partial = one_body_partial_trace(&s).unwrap();
        assert!((&ladder - &partial).amax() < 1e-10);
        let mean_n = s.number_expectation(|n| n as f64);
        assert!((ladder.trace() - mean_n).abs() < 1e-12);
    }

    #[test]
    fn two_body_structure() {
        let s = rotated_state();
        let g2 = reduced_density_matrix(&s, 2, None).unwrap();
        assert!((&g2 - g2.transpose()).amax() < 1e-12);
        assert!(crate::linalg::symmetric_eigenvalues(&g2).unwrap().min() > -1e-12);
        // Tr Γ⁽²⁾ = E[𝒩(𝒩−1)]/2.
        let pairs = s.number_expectation(|n| (n * n.saturating_sub(1)) as f64 / 2.0);
        assert!((g2.trace() - pairs).abs() < 1e-12);
        // Σ_r Tr(a†_j a†_r a_r a_i Γ) = Tr(a†_j a_i (𝒩−1) Γ), assembled sector by sector.
        let modes = 3;
        let mut weighted = DMatrix::zeros(modes, modes);
        for sec in s.sectors() {
            let mass = sec.mass();
            let w = sec.weights().iter().map(|x| x / mass).collect();
            let alone = StateSector::new(sec.basis().clone(), sec.vectors().cloned(), w).unwrap();
            let g1 = one_body_matrix(&BlockState::new(1, vec![alone]).unwrap());
            weighted += g1 * (mass * (sec.n() as f64 - 1.0).max(0.0));
        }
        for i in 0..modes {
            for j in 0..modes {
                let traced: f64 = (0..modes).map(|r| 2.0 * g2[(i * modes + r, j * modes + r)]).sum();
                assert!((traced - weighted[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scaled_option() {
        let s = rotated_state();
        let a = reduced_density_matrix(&s, 2, None).unwrap();
        let b = reduced_density_matrix(&s, 2, Some(10.0)).unwrap();
        assert!((&a * (2.0 / 100.0) - b).amax() < 1e-15);
    }
}
