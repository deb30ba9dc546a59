use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

const TABLE_POINTS: usize = 4096;

/// Unnormalized standard bump `exp(−1/(1−x²))` on `(−1, 1)`.
fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        let opts = QuadOptions { abs_tol: 1e-16, rel_tol: 1e-15, max_intervals: 4000 };
        integrate(bump, -1.0, 1.0, opts).expect("bump integral converges")
    })
}

/// Mass cutoff `f(s)` applied to `s = ‖u‖²` or `s = n/τ`.
#[derive(Debug, Clone)]
pub enum CutoffProfile {
    Smooth(SmoothCutoff),
    /// Indicator of `s ≤ level`.
    Sharp {
        level: f64,
    },
    ConstantOne,
    Table(TabulatedCutoff),
}

impl CutoffProfile {
    /// Mollified indicator equal to 1 on `[0, K²−η]` and 0 beyond `K²`.
    pub fn smooth(k_cut: f64, eta: f64) -> Result<Self> {
        SmoothCutoff::new(k_cut, eta).map(Self::Smooth)
    }

    /// Indicator of `‖u‖ ≤ K`.
    pub fn sharp(k_cut: f64) -> Result<Self> {
        if !(k_cut > 0.0 && k_cut.is_finite()) {
            return Err(Error::InvalidConfig(format!("sharp cutoff level must be positive, got {k_cut}")));
        }
        Ok(Self::Sharp { level: k_cut * k_cut })
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Self::Smooth(c) => c.eval(s),
            Self::Sharp { level } => {
                if s <= *level {
                    1.0
                } else {
                    0.0
                }
            }
            Self::ConstantOne => 1.0,
            Self::Table(t) => t.eval(s),
        }
    }

    /// Smallest `s₀` with `f = 0` on `(s₀, ∞)`, or `None` when the support is unbounded.
    pub fn support_max(&self) -> Option<f64> {
        match self {
            Self::Smooth(c) => Some(c.k_sq),
            Self::Sharp { level } => Some(*level),
            Self::ConstantOne => None,
            Self::Table(t) => t.support_max(),
        }
    }

    /// Points where the profile is not smooth, for splitting quadratures.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Smooth(c) => vec![c.k_sq - c.eta, c.k_sq],
            Self::Sharp { level } => vec![*level],
            Self::ConstantOne => Vec::new(),
            Self::Table(t) => t.grid.to_vec(),
        }
    }
}

/// Tabulated `f_η(s) = 1 − B(2(s − K² + η/2)/η)` with `B` the bump distribution function.
#[derive(Debug, Clone)]
pub struct SmoothCutoff {
    k_sq: f64,
    eta: f64,
    values: Arc<[f64]>,
    slopes: Arc<[f64]>,
}

impl SmoothCutoff {
    pub fn new(k_cut: f64, eta: f64) -> Result<Self> {
        let k_sq = k_cut * k_cut;
        if !(k_cut > 0.0 && k_cut.is_finite()) {
            return Err(Error::InvalidConfig(format!("cutoff level must be positive, got {k_cut}")));
        }
        if !(eta > 0.0 && eta < 0.5 * k_sq) {
            return Err(Error::InvalidConfig(format!("eta = {eta} must lie in (0, K²/2) with K² = {k_sq}")));
        }
        let mass = bump_mass();
        let n = TABLE_POINTS;
        let step = 2.0 / (n - 1) as f64;
        let opts = QuadOptions { abs_tol: 1e-17, rel_tol: 1e-14, max_intervals: 200 };
        let mut cdf = vec![0.0; n];
        for i in 1..n {
            let a = -1.0 + (i - 1) as f64 * step;
            let b = if i == n - 1 { 1.0 } else { -1.0 + i as f64 * step };
            cdf[i] = cdf[i - 1] + integrate(bump, a, b, opts)? / mass;
        }
        let scale = cdf[n - 1];
        let values: Vec<f64> = cdf.iter().map(|c| (1.0 - c / scale).clamp(0.0, 1.0)).collect();
        // Derivatives in the reference variable t ∈ [−1, 1].
        let mut slopes: Vec<f64> = (0..n).map(|i| -bump(-1.0 + i as f64 * step) / mass).collect();
        fritsch_carlson(&values, step, &mut slopes);
        Ok(Self { k_sq, eta, values: values.into(), slopes: slopes.into() })
    }

    pub fn k_sq(&self) -> f64 {
        self.k_sq
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eval(&self, s: f64) -> f64 {
        let lo = self.k_sq - self.eta;
        if s <= lo {
            return 1.0;
        }
        if s >= self.k_sq {
            return 0.0;
        }
        let t = 2.0 * (s - lo) / self.eta - 1.0;
        hermite(&self.values, &self.slopes, 2.0 / (TABLE_POINTS - 1) as f64, t + 1.0)
    }
}

/// Limits Hermite slopes so that the interpolant stays monotone.
fn fritsch_carlson(values: &[f64], step: f64, slopes: &mut [f64]) {
    for i in 0..values.len() - 1 {
        let delta = (values[i + 1] - values[i]) / step;
        if delta == 0.0 {
            slopes[i] = 0.0;
            slopes[i + 1] = 0.0;
            continue;
        }
        let a = slopes[i] / delta;
        let b = slopes[i + 1] / delta;
        if a < 0.0 {
            slopes[i] = 0.0;
        }
        if b < 0.0 {
            slopes[i + 1] = 0.0;
        }
        let r = a * a + b * b;
        if r > 9.0 {
            let t = 3.0 / r.sqrt();
            slopes[i] = t * a * delta;
            slopes[i + 1] = t * b * delta;
        }
    }
}

fn hermite(values: &[f64], slopes: &[f64], step: f64, x: f64) -> f64 {
    let last = values.len() - 1;
    let pos = (x / step).clamp(0.0, last as f64);
    let i = (pos.floor() as usize).min(last - 1);
    let t = pos - i as f64;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let v = h00 * values[i] + h10 * step * slopes[i] + h01 * values[i + 1] + h11 * step * slopes[i + 1];
    v.clamp(0.0, 1.0)
}

/// User-supplied cutoff, linearly interpolated between strictly increasing nodes.
#[derive(Debug, Clone)]
pub struct TabulatedCutoff {
    grid: Arc<[f64]>,
    values: Arc<[f64]>,
}

impl TabulatedCutoff {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::InvalidConfig("cutoff table needs matching grid and values of length ≥ 2".into()));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("cutoff grid must be nonnegative and strictly increasing".into()));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidConfig("cutoff values must lie in [0, 1]".into()));
        }
        Ok(Self { grid: grid.into(), values: values.into() })
    }

    pub fn eval(&self, s: f64) -> f64 {
        let g = &self.grid;
        if s <= g[0] {
            return self.values[0];
        }
        let last = g.len() - 1;
        if s >= g[last] {
            return self.values[last];
        }
        let i = g.partition_point(|&x| x <= s) - 1;
        let t = (s - g[i]) / (g[i + 1] - g[i]);
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    fn support_max(&self) -> Option<f64> {
        let last = self.values.len() - 1;
        if self.values[last] != 0.0 {
            return None;
        }
        let i = self.values.iter().rposition(|&v| v != 0.0)?;
        Some(self.grid[i + 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth(k: f64, eta: f64) -> CutoffProfile {
        CutoffProfile::smooth(k, eta).unwrap()
    }

    #[test]
    fn plateau_and_zero_regions() {
        let f = smooth(1.0, 0.2);
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(0.8), 1.0);
        assert_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.eval(1.1), 0.0);
        assert_eq!(f.support_max(), Some(1.0));
    }

    // (g ∗ ϑ)(s) = ∫ ϑ_{η/2}(y) 𝟙{s − y ≤ K² − η/2} dy by composite Simpson on a fine grid.
    fn mollification_oracle(k_sq: f64, eta: f64, s: f64) -> f64 {
        let half = eta / 2.0;
        let theta = |y: f64| bump(y / half);
        let simpson = |a: f64, b: f64| {
            let n = 200_000;
            let h = (b - a) / n as f64;
            let mut acc = theta(a) + theta(b);
            for i in 1..n {
                acc += theta(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        let lower = (s - (k_sq - half)).clamp(-half, half);
        simpson(lower, half) / simpson(-half, half)
    }

    #[test]
    fn matches_mollification_quadrature() {
        let f = smooth(1.0, 0.2);
        for &s in &[0.81, 0.85, 0.9, 0.93, 0.99] {
            let v = f.eval(s);
            let o = mollification_oracle(1.0, 0.2, s);
            assert!((v - o).abs() < 1e-9, "s={s}: {v} vs {o}");
        }
        let mid = f.eval(0.9);
        assert!(mid > 0.0 && mid < 1.0);
        assert!((mid - 0.5).abs() < 1e-12);
    }

    #[test]
    fn monotone_everywhere() {
        for &eta in &[0.05, 0.1, 0.2] {
            let f = smooth(1.0, eta);
            let mut prev = f.eval(0.0);
            for i in 1..=100_000 {
                let v = f.eval(1.2 * i as f64 / 100_000.0);
                assert!(v <= prev, "eta={eta}");
                assert!((0.0..=1.0).contains(&v));
                prev = v;
            }
        }
    }

    #[test]
    fn derivative_scales_like_inverse_eta() {
        let mut consts = Vec::new();
        for &eta in &[0.05, 0.1, 0.2] {
            let f = smooth(1.0, eta);
            let h = eta * 1e-5;
            let mut worst: f64 = 0.0;
            for i in 0..=20_000 {
                let s = 1.0 - eta + eta * i as f64 / 20_000.0;
                worst = worst.max(((f.eval(s + h) - f.eval(s - h)) / (2.0 * h)).abs());
            }
            consts.push(worst * eta);
        }
        let expected = 2.0 * (-1.0f64).exp() / bump_mass();
        for c in &consts {
            assert!((c - expected).abs() < 1e-3 * expected, "{consts:?}");
        }
    }

    #[test]
    fn rejects_wide_smoothing() {
        assert!(CutoffProfile::smooth(1.0, 0.5).is_err());
        assert!(CutoffProfile::smooth(1.0, 0.0).is_err());
    }

    #[test]
    fn sharp_and_constant() {
        let f = CutoffProfile::sharp(0.6).unwrap();
        assert_eq!(f.eval(0.36), 1.0);
        assert_eq!(f.eval(0.3600001), 0.0);
        assert_eq!(CutoffProfile::ConstantOne.eval(1e9), 1.0);
        assert_eq!(CutoffProfile::ConstantOne.support_max(), None);
    }

    #[test]
    fn table_interpolates_linearly() {
        let t = TabulatedCutoff::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.0]).unwrap();
        let f = CutoffProfile::Table(t);
        assert!((f.eval(0.5) - 0.75).abs() < 1e-15);
        assert_eq!(f.eval(3.0), 0.0);
        assert_eq!(f.support_max(), Some(2.0));
        assert!(TabulatedCutoff::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }
}
