use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::model::{CutoffProfile, ModelParams};
use crate::qgibbs::sector_hamiltonian;
use crate::semiclassics::coherent::{coherent_vector, poisson_pmf, poisson_truncation};

/// Tail tolerance for the sectors kept in the coherent expansion.
const SECTOR_TAIL_TOL: f64 = 1e-16;

/// `e^{−H} v` by `s = ⌈‖H‖_∞⌉` Taylor substeps of `e^{−H/s}`.
pub(crate) fn exp_neg_apply(h: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    let row_norm = h.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let steps = row_norm.ceil().max(1.0) as usize;
    let hs = h / steps as f64;
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut sum = out.clone();
        for k in 1..200 {
            term = -(&hs * term) / k as f64;
            sum += &term;
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
        }
        out = sum;
    }
    out
}

/// Both sides of the coherent-state expansion of `⟨ξ(√τu), e^{−ℍ_τ} f(𝒩/τ) ξ(√τu)⟩`.
///
/// The left side uses the sector eigendecompositions, the right side the Poisson weights
/// `e^{−τ‖u‖²}(τ‖u‖²)ⁿ/n!` times `⟨φ_n, e^{−ℍ⁽ⁿ⁾} φ_n⟩` for the normalized product state
/// `φ_n = u^{⊗n}/‖u‖ⁿ`, with the exponential applied by Taylor substeps.
pub fn poisson_decomposition_check(
    params: &ModelParams,
    interacting: bool,
    cutoff: &CutoffProfile,
    u: &[Complex64],
) -> Result<(f64, f64)> {
    if u.len() != params.modes() {
        return Err(Error::InvalidConfig("field and parameters have different windows".into()));
    }
    let tau = params.tau;
    let scaled: Vec<Complex64> = u.iter().map(|c| c * tau.sqrt()).collect();
    let mean: f64 = scaled.iter().map(|c| c.norm_sqr()).sum();
    let mut top = poisson_truncation(mean, SECTOR_TAIL_TOL);
    if let Some(s) = cutoff.support_max() {
        top = top.min((s * tau).floor() as usize);
    }
    let xi = coherent_vector(&scaled, 1.0, Some(top))?;
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for n in 0..=top {
        let f = cutoff.eval(n as f64 / tau);
        if f == 0.0 {
            continue;
        }
        let (basis, amps) = xi.sector(n).expect("sector within truncation");
        if basis.len() > params.sector_cap {
            return Err(Error::ResourceLimit { dim: basis.len(), cap: params.sector_cap });
        }
        let h = sector_hamiltonian(params, basis, interacting);
        let re = DVector::from_iterator(amps.len(), amps.iter().map(|a| a.re));
        let im = DVector::from_iterator(amps.len(), amps.iter().map(|a| a.im));

        let (values, vectors) = symmetric_eigen(&h)?;
        let (or, oi) = (vectors.tr_mul(&re), vectors.tr_mul(&im));
        let direct: f64 = (0..amps.len()).map(|a| (-values[a]).exp() * (or[a] * or[a] + oi[a] * oi[a])).sum();
        lhs += f * direct;

        let weight = poisson_pmf(mean, n);
        if weight == 0.0 {
            continue;
        }
        let norm = (re.norm_squared() + im.norm_squared()).sqrt();
        let (pr, pi) = (&re / norm, &im / norm);
        let expectation = pr.dot(&exp_neg_apply(&h, &pr)) + pi.dot(&exp_neg_apply(&h, &pi));
        rhs += weight * f * expectation;
    }
    Ok((lhs, rhs))
}
