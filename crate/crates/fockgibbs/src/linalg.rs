//! Dense Hermitian eigendecompositions on nalgebra storage, computed by faer.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn to_faer<T: Copy>(m: &DMatrix<T>) -> Mat<T> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn failure<E: std::fmt::Debug>(e: E) -> Error {
    Error::NumericalFailure(format!("eigendecomposition did not converge: {e:?}"))
}

fn check_square<T>(m: &DMatrix<T>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidConfig(format!("matrix is {}×{}, not square", m.nrows(), m.ncols())));
    }
    Ok(())
}

/// Ascending eigenvalues and orthonormal eigenvectors (as columns) of a real symmetric
/// matrix; only the lower triangle is read.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_square(m)?;
    let evd = to_faer(m).self_adjoint_eigen(Side::Lower).map_err(failure)?;
    let (s, u) = (evd.S(), evd.U());
    let dim = m.nrows();
    Ok((DVector::from_fn(dim, |i, _| s[i]), DMatrix::from_fn(dim, dim, |i, j| u[(i, j)])))
}

pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    check_square(m)?;
    let values = to_faer(m).self_adjoint_eigenvalues(Side::Lower).map_err(failure)?;
    Ok(DVector::from_vec(values))
}

/// Ascending eigenvalues and unitary eigenvectors of a Hermitian matrix; only the lower
/// triangle is read.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
    check_square(m)?;
    let evd = to_faer(m).self_adjoint_eigen(Side::Lower).map_err(failure)?;
    let (s, u) = (evd.S(), evd.U());
    let dim = m.nrows();
    Ok((DVector::from_fn(dim, |i, _| s[i].re), DMatrix::from_fn(dim, dim, |i, j| u[(i, j)])))
}

pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<DVector<f64>> {
    check_square(m)?;
    let values = to_faer(m).self_adjoint_eigenvalues(Side::Lower).map_err(failure)?;
    Ok(DVector::from_vec(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_sector;
    use crate::model::ModelParams;
    use crate::qgibbs::sector_hamiltonian;

    fn reconstruction_error(m: &DMatrix<f64>) -> f64 {
        let (values, vectors) = symmetric_eigen(m).unwrap();
        let rebuilt = &vectors * DMatrix::from_diagonal(&values) * vectors.transpose();
        let orth = (vectors.transpose() * &vectors - DMatrix::identity(m.nrows(), m.nrows())).amax();
        (rebuilt - m).amax().max(orth) / m.amax()
    }

    #[test]
    fn interacting_sectors_reconstruct() {
        let p = ModelParams::new(30.43, 0.328, 0.1, 0.791, 1).unwrap();
        for n in [3, 10, 17, 20, 24] {
            let h = sector_hamiltonian(&p, &enumerate_sector(1, n, usize::MAX).unwrap(), true);
            let err = reconstruction_error(&h);
            assert!(err < 1e-13, "n = {n}: {err:e}");
            let values = symmetric_eigenvalues(&h).unwrap();
            assert!((values - symmetric_eigen(&h).unwrap().0).amax() < 1e-12 * h.amax());
        }
    }

    #[test]
    fn hermitian_pair() {
        let m = DMatrix::from_fn(4, 4, |i, j| Complex64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let h = &m + m.adjoint();
        let (values, vectors) = hermitian_eigen(&h).unwrap();
        let d = DMatrix::from_diagonal(&values.map(|v| Complex64::new(v, 0.0)));
        assert!((&vectors * d * vectors.adjoint() - &h).camax() < 1e-12 * h.camax());
        assert!((hermitian_eigenvalues(&h).unwrap() - &values).amax() < 1e-12 * h.camax());
        assert!(values.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_rectangular() {
        assert!(symmetric_eigen(&DMatrix::zeros(2, 3)).is_err());
    }
}
