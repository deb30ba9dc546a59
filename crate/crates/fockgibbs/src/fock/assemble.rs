use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::fock::ladder::{apply, Ladder};
use crate::fock::SectorBasis;
use crate::model::{eigenvalue, mode_of_index, KernelSpec};

/// Real symmetric matrix on one particle-number sector.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    pub n: usize,
    pub matrix: DMatrix<f64>,
}

impl SectorOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `‖A − Aᵀ‖_F / ‖A‖_F`, zero for the zero matrix.
    pub fn asymmetry(&self) -> f64 {
        let norm = self.matrix.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&self.matrix - self.matrix.transpose()).norm() / norm
    }
}

/// Diagonal kinetic operator `Σ_k λ_k n_k`.
pub fn assemble_kinetic(basis: &SectorBasis) -> SectorOperator {
    let k_max = basis.k_max();
    let levels: Vec<f64> = (0..basis.modes()).map(|j| eigenvalue(mode_of_index(j, k_max))).collect();
    let diag: Vec<f64> =
        basis.states().iter().map(|s| s.counts().iter().zip(&levels).map(|(&c, l)| c as f64 * l).sum()).collect();
    SectorOperator { n: basis.n(), matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)) }
}

/// Diagonal total-momentum operator `Σ_k k n_k`.
pub fn momentum_diagonal(basis: &SectorBasis) -> Vec<f64> {
    basis.states().iter().map(|s| s.momentum() as f64).collect()
}

/// Second-quantized three-body interaction
/// `(1/6) Σ ŵ(k₅−k₂) ŵ(k₆−k₃) a†_{k₁} a†_{k₂} a†_{k₃} a_{k₄} a_{k₅} a_{k₆}`
/// over `k₁+k₂+k₃ = k₄+k₅+k₆`, with `ŵ` the Fourier coefficients of the periodized kernel.
pub fn assemble_interaction(basis: &SectorBasis, kernel: &KernelSpec, eps: f64) -> SectorOperator {
    let dim = basis.len();
    let n = basis.n();
    if n < 3 {
        return SectorOperator { n, matrix: DMatrix::zeros(dim, dim) };
    }
    let modes = basis.modes();
    let k_max = basis.k_max() as i64;
    // ŵ(Δ) for Δ ∈ [−2k_max, 2k_max].
    let coeffs: Vec<f64> = (-2 * k_max..=2 * k_max).map(|d| kernel.fourier(eps, d)).collect();
    let w = |d: i64| coeffs[(d + 2 * k_max) as usize];

    let columns: Vec<Vec<(usize, f64)>> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let mut out: Vec<(usize, f64)> = Vec::new();
            let mut c = basis.state(col).counts().to_vec();
            for j6 in 0..modes {
                let a6 = apply(&mut c, j6, Ladder::Annihilate);
                if a6 == 0.0 {
                    continue;
                }
                for j5 in 0..modes {
                    let a5 = apply(&mut c, j5, Ladder::Annihilate);
                    if a5 == 0.0 {
                        continue;
                    }
                    for j4 in 0..modes {
                        let a4 = apply(&mut c, j4, Ladder::Annihilate);
                        if a4 == 0.0 {
                            continue;
                        }
                        let down = a6 * a5 * a4;
                        // Window indices share the offset k_max, so sums of indices track momenta.
                        let total = (j4 + j5 + j6) as i64;
                        for j2 in 0..modes {
                            let w52 = w(j5 as i64 - j2 as i64);
                            if w52 == 0.0 {
                                continue;
                            }
                            for j3 in 0..modes {
                                let j1 = total - j2 as i64 - j3 as i64;
                                if j1 < 0 || j1 >= modes as i64 {
                                    continue;
                                }
                                let v = w52 * w(j6 as i64 - j3 as i64);
                                if v == 0.0 {
                                    continue;
                                }
                                let c3 = apply(&mut c, j3, Ladder::Create);
                                let c2 = apply(&mut c, j2, Ladder::Create);
                                let c1 = apply(&mut c, j1 as usize, Ladder::Create);
                                let row = basis.index_of(&c).expect("interaction preserves particle number");
                                out.push((row, v * down * c1 * c2 * c3 / 6.0));
                                c[j1 as usize] -= 1;
                                c[j2] -= 1;
                                c[j3] -= 1;
                            }
                        }
                        c[j4] += 1;
                    }
                    c[j5] += 1;
                }
                c[j6] += 1;
            }
            out
        })
        .collect();

    let mut matrix = DMatrix::zeros(dim, dim);
    for (col, entries) in columns.into_iter().enumerate() {
        for (row, v) in entries {
            matrix[(row, col)] += v;
        }
    }
    // Exact symmetrization removes rounding asymmetry from the accumulation order.
    let sym = (&matrix + matrix.transpose()) * 0.5;
    SectorOperator { n, matrix: sym }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_sector;
    use crate::linalg::symmetric_eigenvalues;
    use crate::quad::gauss_legendre;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn kinetic_diagonals() {
        let vac = enumerate_sector(1, 0, 10).unwrap();
        assert_eq!(assemble_kinetic(&vac).matrix[(0, 0)], 0.0);
        let two = enumerate_sector(0, 2, 10).unwrap();
        assert_eq!(assemble_kinetic(&two).matrix[(0, 0)], 1.0);
        let one = enumerate_sector(1, 1, 10).unwrap();
        let i = one.index_of(&[0, 0, 1]).unwrap();
        assert!((assemble_kinetic(&one).matrix[(i, i)] - 20.23921).abs() < 1e-5);
    }

    #[test]
    fn vanishes_below_three_particles() {
        let w = KernelSpec::default();
        for n in 0..3 {
            let b = enumerate_sector(1, n, 100).unwrap();
            assert_eq!(assemble_interaction(&b, &w, 0.5).matrix.norm(), 0.0);
        }
    }

    #[test]
    fn single_mode_three_particles() {
        let b = enumerate_sector(0, 3, 10).unwrap();
        let m = assemble_interaction(&b, &KernelSpec::default(), 0.5);
        assert!((m.matrix[(0, 0)] - 1.0).abs() < 1e-15);
    }

    fn mode_list(counts: &[u32], k_max: i64) -> Vec<i64> {
        counts.iter().enumerate().flat_map(|(j, &c)| std::iter::repeat_n(j as i64 - k_max, c as usize)).collect()
    }

    fn permutations3() -> [[usize; 3]; 6] {
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
    }

    // Normalized symmetrized plane-wave tensor state on the torus³.
    fn sym_state(modes: &[i64], x: [f64; 3]) -> Complex64 {
        let mut mult = std::collections::HashMap::new();
        for &k in modes {
            *mult.entry(k).or_insert(0u32) += 1;
        }
        let norm: f64 = mult.values().map(|&m| (1..=m).product::<u32>() as f64).product();
        let mut acc = Complex64::new(0.0, 0.0);
        for p in permutations3() {
            let phase: f64 = (0..3).map(|i| modes[p[i]] as f64 * x[i]).sum();
            acc += Complex64::from_polar(1.0, 2.0 * PI * phase);
        }
        acc / (6.0 * norm).sqrt()
    }

    // ⟨m|W|m'⟩ with W = (1/3)Σ_centres w(x_c − x_a) w(x_c − x_b): for each centre the two
    // offsets run over the kernel support by Gauss–Legendre and the centre by the trapezoid rule.
    fn position_space_element(bra: &[i64], ket: &[i64], kernel: &KernelSpec, eps: f64) -> f64 {
        let gl = gauss_legendre(24);
        let half = kernel.support_radius() * eps;
        let grid = 16;
        let mut total = Complex64::new(0.0, 0.0);
        for centre in 0..3 {
            let others: Vec<usize> = (0..3).filter(|&i| i != centre).collect();
            for g in 0..grid {
                let xc = g as f64 / grid as f64;
                for &(ts, ws) in &gl {
                    let s = half * ts;
                    for &(tt, wt) in &gl {
                        let t = half * tt;
                        let mut x = [0.0; 3];
                        x[centre] = xc;
                        x[others[0]] = xc - s;
                        x[others[1]] = xc - t;
                        let weight =
                            ws * wt * half * half / grid as f64 * kernel.periodized(eps, s) * kernel.periodized(eps, t);
                        total += sym_state(bra, x).conj() * sym_state(ket, x) * weight;
                    }
                }
            }
        }
        (total / 3.0).re
    }

    #[test]
    fn matches_position_space_kernel() {
        let kernel = KernelSpec::default();
        let eps = 0.5;
        let b = enumerate_sector(1, 3, 100).unwrap();
        let m = assemble_interaction(&b, &kernel, eps);
        for (i, si) in b.states().iter().enumerate() {
            for (j, sj) in b.states().iter().enumerate() {
                let oracle =
                    position_space_element(&mode_list(si.counts(), 1), &mode_list(sj.counts(), 1), &kernel, eps);
                assert!((m.matrix[(i, j)] - oracle).abs() < 1e-8, "({i},{j}) {} vs {oracle}", m.matrix[(i, j)]);
            }
        }
    }

    #[test]
    fn hermitian_positive_and_momentum_conserving() {
        let kernel = KernelSpec::default();
        for k_max in 0..=2 {
            for n in 3..=8 {
                let b = enumerate_sector(k_max, n, 5000).unwrap();
                for &eps in &[0.25, 0.5, 1.0] {
                    let op = assemble_interaction(&b, &kernel, eps);
                    assert!(op.asymmetry() < 1e-10);
                    let values = symmetric_eigenvalues(&op.matrix).unwrap();
                    let norm = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
                    assert!(min >= -1e-8 * norm, "k_max={k_max} n={n} eps={eps} min={min}");
                    let bound = (n as f64).powi(3) / (eps * eps) * kernel.sup_norm().powi(2);
                    assert!(norm <= bound, "norm {norm} exceeds {bound}");
                    let p = momentum_diagonal(&b);
                    let mut comm: f64 = 0.0;
                    for i in 0..b.len() {
                        for j in 0..b.len() {
                            comm = comm.max((op.matrix[(i, j)] * (p[j] - p[i])).abs());
                        }
                    }
                    assert!(comm <= 1e-10);
                }
            }
        }
    }
}
