use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cgibbs::FieldSample;
use crate::error::{Error, Result};
use crate::model::{mode_count, mode_of_index, KernelSpec};

/// Default trapezoid grid `max(64, 8·k_max)` rounded up to a power of two.
pub fn default_grid_size(k_max: usize) -> usize {
    (8 * k_max).max(64).next_power_of_two()
}

/// Trapezoid evaluation of `(1/6)∫|u|⁶` with cached twiddles for one window and grid.
#[derive(Debug, Clone)]
pub struct LocalEnergy {
    modes: usize,
    size: usize,
    /// Row-major `e^{2πik_j g/G}`.
    twiddles: Vec<Complex64>,
}

impl LocalEnergy {
    pub fn new(k_max: usize, size: usize) -> Result<Self> {
        if !size.is_power_of_two() || size < 8 * k_max {
            return Err(Error::InvalidConfig(format!(
                "grid size {size} must be a power of two at least {}",
                8 * k_max
            )));
        }
        let modes = mode_count(k_max);
        let twiddles = (0..size)
            .flat_map(|g| {
                (0..modes).map(move |j| {
                    Complex64::from_polar(1.0, 2.0 * PI * (mode_of_index(j, k_max) * g as i64) as f64 / size as f64)
                })
            })
            .collect();
        Ok(Self { modes, size, twiddles })
    }

    pub fn eval(&self, u: &FieldSample) -> f64 {
        debug_assert_eq!(u.coeffs.len(), self.modes);
        let mut acc = 0.0;
        for row in self.twiddles.chunks_exact(self.modes) {
            let v: Complex64 = row.iter().zip(&u.coeffs).map(|(t, a)| t * a).sum();
            acc += v.norm_sqr().powi(3);
        }
        acc / (6.0 * self.size as f64)
    }
}

/// `(1/6)∫|u|⁶` by the trapezoid rule on `grid_size` points.
pub fn local_energy(u: &FieldSample, grid_size: usize) -> Result<f64> {
    Ok(LocalEnergy::new(u.k_max(), grid_size)?.eval(u))
}

/// Exact `(1/6)∫(w^ε∗|u|²)²|u|²` through the Fourier modes of `|u|²`.
#[derive(Debug, Clone)]
pub struct HartreeEnergy {
    k_max: usize,
    /// `ŵ(εp)` for `|p| ≤ 2k_max`, offset by `2k_max`.
    weights: Vec<f64>,
}

impl HartreeEnergy {
    pub fn new(k_max: usize, kernel: &KernelSpec, eps: f64) -> Self {
        let top = 2 * k_max as i64;
        let weights = (-top..=top).map(|p| kernel.fourier(eps, p)).collect();
        Self { k_max, weights }
    }

    pub fn eval(&self, u: &FieldSample) -> f64 {
        debug_assert_eq!(u.k_max(), self.k_max);
        let top = 2 * self.k_max;
        // ρ̂(p) = Σ_k α_{k+p} ᾱ_k, stored at p + 2k_max.
        let mut rho = vec![Complex64::new(0.0, 0.0); 2 * top + 1];
        for (i, a) in u.coeffs.iter().enumerate() {
            for (j, b) in u.coeffs.iter().enumerate() {
                rho[i + top - j] += a * b.conj();
            }
        }
        let smeared: Vec<Complex64> = rho.iter().zip(&self.weights).map(|(r, w)| r * w).collect();
        let span = 2 * top as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, sp) in smeared.iter().enumerate() {
            for (q, sq) in smeared.iter().enumerate() {
                // Centred modes satisfy p + q + r = 0.
                let r = 3 * top as i64 - p as i64 - q as i64;
                if (0..=span).contains(&r) {
                    acc += sp * sq * rho[r as usize];
                }
            }
        }
        acc.re / 6.0
    }
}

/// Hartree energy of `u` with the kernel scaled to range `eps`.
pub fn hartree_energy(u: &FieldSample, kernel: &KernelSpec, eps: f64) -> f64 {
    HartreeEnergy::new(u.k_max(), kernel, eps).eval(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgibbs::sample_free_field;
    use crate::quad::gauss_legendre;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field(k_max: usize, pairs: &[(i64, Complex64)]) -> FieldSample {
        let mut c = vec![Complex64::new(0.0, 0.0); mode_count(k_max)];
        for &(k, a) in pairs {
            c[(k + k_max as i64) as usize] = a;
        }
        FieldSample::new(c)
    }

    #[test]
    fn constants_and_unimodular() {
        let c = 0.7;
        let u = field(2, &[(0, Complex64::new(c, 0.0))]);
        let w = KernelSpec::default();
        assert!((local_energy(&u, 64).unwrap() - c.powi(6) / 6.0).abs() < 1e-15);
        assert!((hartree_energy(&u, &w, 0.5) - c.powi(6) / 6.0).abs() < 1e-15);
        let e = field(1, &[(1, Complex64::new(1.0, 0.0))]);
        assert!((local_energy(&e, 64).unwrap() - 1.0 / 6.0).abs() < 1e-14);
        assert!((hartree_energy(&e, &w, 0.5) - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn grid_validation() {
        let u = field(10, &[]);
        assert!(local_energy(&u, 64).is_err());
        assert!(local_energy(&u, 96).is_err());
        assert!(local_energy(&u, 128).is_ok());
        assert_eq!(default_grid_size(3), 64);
        assert_eq!(default_grid_size(9), 128);
    }

    #[test]
    fn local_energy_grid_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k_max in 1..=4 {
            let u = sample_free_field(k_max, &mut rng);
            let a = local_energy(&u, 64).unwrap();
            let b = local_energy(&u, 128).unwrap();
            assert!((a - b).abs() < 1e-12 * a.max(1e-300) + 1e-15);
            assert!(a >= 0.0);
        }
    }

    #[test]
    fn local_energy_matches_pointwise_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = sample_free_field(2, &mut rng);
        let nodes = gauss_legendre(40);
        let direct: f64 =
            nodes.iter().map(|&(t, w)| 0.5 * w * u.eval(0.5 * (t + 1.0)).norm_sqr().powi(3)).sum::<f64>() / 6.0;
        assert!((local_energy(&u, 64).unwrap() - direct).abs() < 1e-13);
    }

    // (1/3!)∭ w^ε(x−y)w^ε(x−z)ρ(x)ρ(y)ρ(z), with x on a trapezoid grid and y, z by
    // Gauss–Legendre on the support of the periodized kernel around x.
    fn position_space_hartree(u: &FieldSample, kernel: &KernelSpec, eps: f64) -> f64 {
        let nodes = gauss_legendre(48);
        let reach = kernel.support_radius() * eps;
        let panels = 8;
        let smear = |x: f64| -> f64 {
            let mut acc = 0.0;
            for m in 0..panels {
                let lo = x - reach + 2.0 * reach * m as f64 / panels as f64;
                let h = 2.0 * reach / panels as f64;
                for &(t, w) in &nodes {
                    let y = lo + 0.5 * h * (t + 1.0);
                    acc += 0.5 * h * w * kernel.periodized(eps, x - y) * u.eval(y).norm_sqr();
                }
            }
            acc
        };
        let grid = 256;
        let mut total = 0.0;
        for g in 0..grid {
            let x = g as f64 / grid as f64;
            let (wy, wz) = (smear(x), smear(x));
            total += wy * wz * u.eval(x).norm_sqr();
        }
        total / grid as f64 / 6.0
    }

    #[test]
    fn hartree_matches_position_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let w = KernelSpec::default();
        for k_max in 1..=2 {
            let u = sample_free_field(k_max, &mut rng);
            let oracle = position_space_hartree(&u, &w, 0.5);
            let fourier = hartree_energy(&u, &w, 0.5);
            assert!((oracle - fourier).abs() < 1e-8, "k_max={k_max}: {oracle} vs {fourier}");
        }
    }

    #[test]
    fn hartree_tends_to_local() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let w = KernelSpec::default();
        for _ in 0..5 {
            let u = sample_free_field(3, &mut rng);
            let local = local_energy(&u, 64).unwrap();
            let gaps: Vec<f64> =
                [0.4, 0.2, 0.1, 0.05].iter().map(|&e| (hartree_energy(&u, &w, e) - local).abs()).collect();
            assert!(gaps.windows(2).all(|g| g[1] < g[0]), "{gaps:?}");
        }
    }
}
