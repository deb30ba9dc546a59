use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::hermitian_eigen;
use crate::model::eigenvalue;

/// `e^A` for Hermitian `A` through its spectral decomposition.
pub fn hermitian_exp(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (values, u) = hermitian_eigen(a)?;
    let d = DMatrix::from_diagonal(&values.map(|e| Complex64::new(e.exp(), 0.0)));
    Ok(&u * d * u.adjoint())
}

/// `(⟨x, e^A x⟩, e^{⟨x, A x⟩})` for Hermitian `A` and unit `x`; the first dominates.
pub fn peierls_bogoliubov(a: &DMatrix<Complex64>, x: &DVector<Complex64>) -> Result<(f64, f64)> {
    let lhs = x.dotc(&(hermitian_exp(a)? * x)).re;
    let rhs = x.dotc(&(a * x)).re.exp();
    Ok((lhs, rhs))
}

/// `(Tr(Z e^{X+Y}), Tr(Z e^X e^Y))` for Hermitian `X`, `Y` and `Z ≥ 0` commuting with both;
/// the first is bounded by the second.
pub fn golden_thompson(z: &DMatrix<Complex64>, x: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> Result<(f64, f64)> {
    let lhs = (z * hermitian_exp(&(x + y))?).trace().re;
    let rhs = (z * hermitian_exp(x)? * hermitian_exp(y)?).trace().re;
    Ok((lhs, rhs))
}

/// `(Π_j (τ/λ_j)(1 − e^{−λ_j/τ}), 1 − Σ_j λ_j/(2τ))` over the window `|k| ≤ k_max`.
pub fn bernoulli_product_bound(k_max: usize, tau: f64) -> (f64, f64) {
    let levels: Vec<f64> = (-(k_max as i64)..=k_max as i64).map(eigenvalue).collect();
    let lhs = levels.iter().map(|l| tau / l * -(-l / tau).exp_m1()).product();
    let rhs = 1.0 - levels.iter().sum::<f64>() / (2.0 * tau);
    (lhs, rhs)
}
