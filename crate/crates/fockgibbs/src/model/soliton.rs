use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Ground state `Q(x) = (3 sech²(2x))^{1/4}` of `Q″ = Q − Q⁵` on the real line.
#[derive(Debug, Clone, Copy)]
pub struct SolitonProfile {
    pub mass: f64,
    pub kinetic: f64,
    pub sextic: f64,
}

impl SolitonProfile {
    pub fn eval(&self, x: f64) -> f64 {
        let s = 1.0 / (2.0 * x).cosh();
        (3.0 * s * s).powf(0.25)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        -(2.0 * x).tanh() * self.eval(x)
    }
}

/// Closed-form profile with `‖Q‖² = √3π/2`, `‖Q′‖² = √3π/4` and `‖Q‖⁶₆ = 3√3π/4`.
pub fn soliton() -> SolitonProfile {
    let r3 = 3f64.sqrt();
    SolitonProfile { mass: r3 * PI / 2.0, kinetic: r3 * PI / 4.0, sextic: 3.0 * r3 * PI / 4.0 }
}

/// Threshold mass `‖Q‖_{L²}`.
pub fn critical_mass() -> f64 {
    soliton().mass.sqrt()
}

/// Sharp constant `3‖Q‖⁻⁴` of the real-line inequality `‖v‖⁶₆ ≤ C‖v′‖²‖v‖⁴`.
pub fn gns_constant() -> f64 {
    3.0 / soliton().mass.powi(2)
}

/// Norms recovered from the even shooting solution of `Q″ = Q − Q⁵`.
#[derive(Debug, Clone, Copy)]
pub struct ShootingReport {
    pub initial_value: f64,
    pub mass: f64,
    pub kinetic: f64,
    pub sextic: f64,
}

#[derive(PartialEq)]
enum Fate {
    CrossesZero,
    TurnsBack,
    Undecided,
}

fn rhs(q: f64, p: f64) -> (f64, f64) {
    (p, q - q.powi(5))
}

fn rk4(q: f64, p: f64, h: f64) -> (f64, f64) {
    let (k1q, k1p) = rhs(q, p);
    let (k2q, k2p) = rhs(q + 0.5 * h * k1q, p + 0.5 * h * k1p);
    let (k3q, k3p) = rhs(q + 0.5 * h * k2q, p + 0.5 * h * k2p);
    let (k4q, k4p) = rhs(q + h * k3q, p + h * k3p);
    (q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q), p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p))
}

fn classify(q0: f64, h: f64, length: f64) -> Fate {
    let (mut q, mut p) = (q0, 0.0);
    let steps = (length / h) as usize;
    for _ in 0..steps {
        (q, p) = rk4(q, p, h);
        if q < 0.0 {
            return Fate::CrossesZero;
        }
        if p > 0.0 {
            return Fate::TurnsBack;
        }
    }
    Fate::Undecided
}

/// Bisects `Q(0)` on the even shooting problem and integrates the norms of the
/// resulting trajectory, fails if they miss the closed form by more than `1e−6`.
pub fn shoot_soliton() -> Result<ShootingReport> {
    let h = 1e-3;
    let target = 3f64.powf(0.25);
    let (mut lo, mut hi) = (0.9 * target, 1.1 * target);
    while hi - lo > 4.0 * f64::EPSILON * target {
        let mid = 0.5 * (lo + hi);
        match classify(mid, h, 20.0) {
            Fate::CrossesZero => hi = mid,
            Fate::TurnsBack => lo = mid,
            Fate::Undecided => break,
        }
    }
    let q0 = 0.5 * (lo + hi);

    // Simpson on [0, L]; beyond L the solution is ∝ e^{−x} so the tails are closed form.
    let length = 10.0;
    let steps = (length / h) as usize;
    let (mut q, mut p) = (q0, 0.0);
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push((q, p));
    for _ in 0..steps {
        (q, p) = rk4(q, p, h);
        samples.push((q, p));
    }
    let simpson = |f: &dyn Fn(f64, f64) -> f64| {
        let mut acc = 0.0;
        for (i, &(q, p)) in samples.iter().enumerate() {
            let w = if i == 0 || i == steps {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * f(q, p);
        }
        acc * h / 3.0
    };
    let q_end = samples[steps].0;
    let mass = 2.0 * (simpson(&|q, _| q * q) + 0.5 * q_end * q_end);
    let kinetic = 2.0 * (simpson(&|_, p| p * p) + 0.5 * q_end * q_end);
    let sextic = 2.0 * (simpson(&|q, _| q.powi(6)) + q_end.powi(6) / 6.0);

    let report = ShootingReport { initial_value: q0, mass, kinetic, sextic };
    let exact = soliton();
    let worst = [(mass, exact.mass), (kinetic, exact.kinetic), (sextic, exact.sextic)]
        .iter()
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if worst > 1e-6 {
        return Err(Error::NumericalFailure(format!("shooting norms deviate from the closed form by {worst:.3e}")));
    }
    Ok(report)
}
