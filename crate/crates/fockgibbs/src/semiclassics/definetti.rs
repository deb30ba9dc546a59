use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{created, enumerate_sector, BlockState};
use crate::linalg::symmetric_eigenvalues;
use crate::qgibbs::reduced_density_matrix;

/// `Tr(Γ a_{i₁}⋯a_{i_k} a†_{j_k}⋯a†_{j₁})` on the tensor basis, computed as inner products
/// of `a†_{i_k}⋯a†_{i₁} v_a` in the sector `n + k`.
fn antinormal_moment(state: &BlockState, k: usize) -> DMatrix<f64> {
    let modes = state.modes();
    let size = modes.pow(k as u32);
    let mut out = DMatrix::zeros(size, size);
    for sector in state.sectors().iter().filter(|s| s.mass() > 0.0) {
        let mut ladder = vec![sector.basis().as_ref().clone()];
        for step in 1..=k {
            ladder.push(enumerate_sector(state.k_max(), sector.n() + step, usize::MAX).expect("upper sector"));
        }
        for a in 0..sector.dim() {
            let p = sector.weights()[a];
            if p == 0.0 {
                continue;
            }
            // Tensor index i₁J^{k−1}+…+i_k holds a†_{i_k}⋯a†_{i₁} v.
            let mut layer: Vec<DVector<f64>> = vec![sector.vector(a)];
            for step in 0..k {
                layer = layer.iter().flat_map(|v| created(&ladder[step], &ladder[step + 1], v)).collect();
            }
            for i in 0..size {
                for j in 0..size {
                    out[(i, j)] += p * layer[i].dot(&layer[j]);
                }
            }
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Quantitative de Finetti comparison at order `k ≤ 2`: the trace norm of the Husimi moment
/// matrix `∫|u^{⊗k}⟩⟨u^{⊗k}|dμ^ς_Γ` minus `k!ς^kΓ⁽ᵏ⁾`, and the bound
/// `ς^k Σ_{ℓ<k} C(k,ℓ)² (k−ℓ+J−1)!/(J−1)! Tr[𝒩^ℓΓ]`.
pub fn definetti_gap(state: &BlockState, scale: f64, k: usize) -> Result<(f64, f64)> {
    if !(1..=2).contains(&k) {
        return Err(Error::UnsupportedOrder(k));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidConfig(format!("Husimi scale must be positive, got {scale}")));
    }
    let moment = antinormal_moment(state, k);
    let k_fact = (1..=k).product::<usize>() as f64;
    let normal = reduced_density_matrix(state, k, None)? * k_fact;
    let diff = (moment - normal) * scale.powi(k as i32);
    let sym = (&diff + diff.transpose()) * 0.5;
    let lhs = symmetric_eigenvalues(&sym)?.iter().map(|e| e.abs()).sum();
    let modes = state.modes();
    let rhs: f64 = (0..k)
        .map(|ell| {
            let rising: f64 = (0..k - ell).map(|i| (modes + i) as f64).product();
            binomial(k, ell).powi(2) * rising * state.number_expectation(|n| (n as f64).powi(ell as i32))
        })
        .sum::<f64>()
        * scale.powi(k as i32);
    Ok((lhs, rhs))
}
