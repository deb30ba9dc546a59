use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

/// Even, nonnegative, compactly supported interaction profile with unit mass.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    /// `𝟙_{[−a, a]}/(2a)`.
    Box { half_width: f64 },
    /// Piecewise-linear profile through `(radii[i], values[i])`, extended evenly
    /// and rescaled to unit mass.
    Custom { radii: Arc<[f64]>, values: Arc<[f64]> },
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self::Box { half_width: 0.5 }
    }
}

impl KernelSpec {
    pub fn box_kernel(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width <= 0.5) {
            return Err(Error::InvalidConfig(format!("box half-width must lie in (0, 1/2], got {half_width}")));
        }
        Ok(Self::Box { half_width })
    }

    pub fn custom(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 || radii.len() != values.len() {
            return Err(Error::InvalidConfig("kernel table needs matching radii and values of length ≥ 2".into()));
        }
        if radii[0] != 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("kernel radii must start at 0 and increase strictly".into()));
        }
        if *radii.last().unwrap() > 0.5 {
            return Err(Error::InvalidConfig("kernel support must fit in |x| ≤ 1/2".into()));
        }
        if values.iter().any(|&v| v < 0.0) || *values.last().unwrap() != 0.0 {
            return Err(Error::InvalidConfig("kernel values must be nonnegative and vanish at the last radius".into()));
        }
        let mass: f64 = radii.windows(2).zip(values.windows(2)).map(|(r, v)| (r[1] - r[0]) * (v[0] + v[1])).sum();
        if mass <= 0.0 {
            return Err(Error::InvalidConfig("kernel profile has zero mass".into()));
        }
        let values: Vec<f64> = values.iter().map(|v| v / mass).collect();
        Ok(Self::Custom { radii: radii.into(), values: values.into() })
    }

    /// Profile value `w(x)` on the real line.
    pub fn profile(&self, x: f64) -> f64 {
        let r = x.abs();
        match self {
            Self::Box { half_width } => {
                if r <= *half_width {
                    0.5 / half_width
                } else {
                    0.0
                }
            }
            Self::Custom { radii, values } => {
                let last = radii.len() - 1;
                if r >= radii[last] {
                    return 0.0;
                }
                let i = radii.partition_point(|&x| x <= r) - 1;
                let t = (r - radii[i]) / (radii[i + 1] - radii[i]);
                values[i] * (1.0 - t) + values[i + 1] * t
            }
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Self::Box { half_width } => 0.5 / half_width,
            Self::Custom { values, .. } => values.iter().cloned().fold(0.0, f64::max),
        }
    }

    /// Radius of the support of the profile.
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::Box { half_width } => *half_width,
            Self::Custom { radii, .. } => *radii.last().unwrap(),
        }
    }

    /// Real-line transform `ŵ(ξ) = ∫ w(x) e^{−2πixξ} dx`.
    pub fn transform(&self, xi: f64) -> f64 {
        match self {
            Self::Box { half_width } => {
                let z = 2.0 * PI * half_width * xi;
                if z.abs() < 1e-8 {
                    1.0 - z * z / 6.0
                } else {
                    z.sin() / z
                }
            }
            Self::Custom { radii, values } => {
                let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 500 };
                let w = 2.0 * PI * xi;
                radii
                    .windows(2)
                    .zip(values.windows(2))
                    .map(|(r, v)| {
                        let seg = |x: f64| {
                            let t = (x - r[0]) / (r[1] - r[0]);
                            (v[0] * (1.0 - t) + v[1] * t) * (w * x).cos()
                        };
                        2.0 * integrate(seg, r[0], r[1], opts).expect("smooth segment integral")
                    })
                    .sum()
            }
        }
    }

    /// Fourier coefficient of the periodized kernel `w^ε` at mode `k`, which is `ŵ(εk)`.
    pub fn fourier(&self, eps: f64, k: i64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        self.transform(eps * k as f64)
    }

    /// Periodized kernel `Σ_m ε⁻¹ w((x + m)/ε)` at a point of the torus.
    pub fn periodized(&self, eps: f64, x: f64) -> f64 {
        let x = x - x.floor();
        let reach = (self.support_radius() * eps).ceil() as i64 + 1;
        (-reach..=reach).map(|m| self.profile((x + m as f64) / eps) / eps).sum()
    }
}
