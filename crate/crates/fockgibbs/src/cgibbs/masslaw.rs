use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{eigenvalue, mode_count, mode_of_index, CutoffProfile};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};

/// Law of the free mass `Σ_{|k|≤k_max}|α_k|²`, a sum of independent exponentials with
/// rates `λ_k`, recovered from its characteristic function `Π λ_k/(λ_k − it)`.
#[derive(Debug, Clone)]
pub struct MassLaw {
    rates: Vec<f64>,
    opts: QuadOptions,
}

impl MassLaw {
    pub fn new(k_max: usize) -> Self {
        let rates = (0..mode_count(k_max)).map(|j| eigenvalue(mode_of_index(j, k_max))).collect();
        Self { rates, opts: QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 } }
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn charfn(&self, t: Complex64) -> Complex64 {
        self.rates.iter().map(|&l| l / (l - Complex64::i() * t)).product()
    }

    /// Rays `t = −ic + r e^{−iπ/4}` stay clear of the poles `−iλ_k` and make `e^{−itx}` decay.
    fn ray(&self, r: f64) -> Complex64 {
        let c = 0.5 * self.rates.iter().cloned().fold(f64::INFINITY, f64::min);
        Complex64::new(0.0, -c) + Complex64::from_polar(r, -FRAC_PI_4)
    }

    /// Density at `x` by inversion along the rotated contour.
    pub fn density(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        if x == 0.0 {
            return Ok(if self.rates.len() == 1 { self.rates[0] } else { 0.0 });
        }
        let dir = Complex64::from_polar(1.0, -FRAC_PI_4);
        let f = |r: f64| {
            let t = self.ray(r);
            (self.charfn(t) * (-Complex64::i() * t * x).exp() * dir).re
        };
        Ok(integrate_to_infinity(f, 0.0, self.opts)? / PI)
    }

    /// `P(mass > x)` by inversion of `φ(t)/(it)` along the rotated contour.
    pub fn survival(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(1.0);
        }
        let dir = Complex64::from_polar(1.0, -FRAC_PI_4);
        let f = |r: f64| {
            let t = self.ray(r);
            (self.charfn(t) * (-Complex64::i() * t * x).exp() / t * dir).im
        };
        Ok(integrate_to_infinity(f, 0.0, self.opts)? / PI)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.survival(x)?)
    }

    /// `∫_a^b ρ` by quadrature of the inverted density.
    pub fn interval_probability(&self, a: f64, b: f64) -> Result<f64> {
        let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 400 };
        integrate(|x| self.density(x).unwrap_or(f64::NAN), a.max(0.0), b.max(0.0), opts)
    }

    /// `∫ f(s) ρ(s) ds`, split at the kinks of the cutoff.
    pub fn cutoff_expectation(&self, cutoff: &CutoffProfile) -> Result<f64> {
        let mut points = cutoff.breakpoints();
        points.push(0.0);
        points.sort_by(f64::total_cmp);
        points.dedup();
        let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-10, max_intervals: 400 };
        let f = |s: f64| cutoff.eval(s) * self.density(s).unwrap_or(f64::NAN);
        let mut total = 0.0;
        for w in points.windows(2) {
            total += integrate(f, w[0], w[1], opts)?;
        }
        if cutoff.support_max().is_none() {
            total += integrate_to_infinity(f, *points.last().unwrap(), opts)?;
        }
        Ok(total)
    }
}

/// Inverted mass density on `x_grid`, after checking that the inverted density carries
/// unit mass to within `1e−4`.
pub fn mass_density_charfn(k_max: usize, x_grid: &[f64]) -> Result<Vec<f64>> {
    let law = MassLaw::new(k_max);
    let lowest = law.rates().iter().cloned().fold(f64::INFINITY, f64::min);
    // Beyond this point the remaining mass is below e^{−40} times a polynomial factor.
    let far = (40.0 + 4.0 * law.rates().len() as f64) / lowest;
    let total = law.interval_probability(0.0, far)?;
    if (total - 1.0).abs() > 1e-4 {
        return Err(Error::QuadratureFailure(format!("inverted mass density integrates to {total}")));
    }
    x_grid.iter().map(|&x| law.density(x)).collect()
}
