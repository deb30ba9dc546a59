use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::gns_constant;

/// Ratio `‖v‖⁶₆/(‖v′‖²‖v‖⁴)` of a compactly supported real-line profile sampled with
/// spacing `dx`, with its slack below the sharp constant. Norms use the trapezoid rule and
/// the derivative enters spectrally through Parseval.
pub fn gns_check(values: &[f64], dx: f64) -> Result<(f64, f64)> {
    let n = values.len();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if n < 4 || peak == 0.0 {
        return Err(Error::DegenerateInput("profile vanishes identically".into()));
    }
    if values[0].abs().max(values[n - 1].abs()) > 1e-8 * peak {
        return Err(Error::DegenerateInput("profile does not vanish at the grid ends".into()));
    }
    let l2: f64 = values.iter().map(|v| v * v).sum::<f64>() * dx;
    let l6: f64 = values.iter().map(|v| v.powi(6)).sum::<f64>() * dx;
    let mut spectrum: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut spectrum);
    let length = n as f64 * dx;
    let mut kinetic = 0.0;
    for (m, c) in spectrum.iter().enumerate() {
        if 2 * m == n {
            continue;
        }
        let freq = if 2 * m < n { m as f64 } else { m as f64 - n as f64 };
        kinetic += (2.0 * PI * freq / length).powi(2) * c.norm_sqr();
    }
    kinetic *= dx / n as f64;
    if kinetic <= 1e-300 {
        return Err(Error::DegenerateInput("derivative vanishes, ratio undefined".into()));
    }
    let ratio = l6 / (kinetic * l2 * l2);
    Ok((ratio, gns_constant() - ratio))
}

/// Random smooth profile on `n` points of spacing `dx`: a sum of up to four compactly
/// supported bumps with random centres, widths, heights and signs, vanishing near the ends.
pub fn random_compact_profile<R: Rng + ?Sized>(rng: &mut R, n: usize, dx: f64) -> Vec<f64> {
    let length = n as f64 * dx;
    let count = rng.gen_range(1..=4);
    let bumps: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            let width = rng.gen_range(0.08..0.3) * length;
            let centre = rng.gen_range(0.2 * length + width * 0.5..0.8 * length - width * 0.5);
            let height = rng.gen_range(-1.0..1.0);
            (centre, width * 0.5, height)
        })
        .collect();
    (0..n)
        .map(|i| {
            let x = i as f64 * dx;
            bumps
                .iter()
                .map(|&(c, r, h)| {
                    let t = (x - c) / r;
                    if t.abs() < 1.0 {
                        h * (-1.0 / (1.0 - t * t)).exp()
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::soliton;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sampled<F: Fn(f64) -> f64>(f: F) -> (Vec<f64>, f64) {
        let n = 4096;
        let dx = 40.0 / n as f64;
        ((0..n).map(|i| f(-20.0 + i as f64 * dx)).collect(), dx)
    }

    #[test]
    fn soliton_is_extremal() {
        let q = soliton();
        let (v, dx) = sampled(|x| q.eval(x));
        let (ratio, slack) = gns_check(&v, dx).unwrap();
        assert!((ratio - 4.0 / (PI * PI)).abs() < 1e-3);
        assert!((ratio - 0.405285).abs() < 1e-6);
        assert!(slack.abs() < 1e-6);
        let (v2, _) = sampled(|x| q.eval(2.0 * x));
        let (ratio2, _) = gns_check(&v2, dx).unwrap();
        assert!((ratio - ratio2).abs() < 1e-6);
    }

    #[test]
    fn gaussian_is_strictly_below() {
        let (v, dx) = sampled(|x| (-x * x).exp());
        let (ratio, slack) = gns_check(&v, dx).unwrap();
        // Closed form for e^{−x²}: ‖v‖⁶₆ = √(π/6), ‖v′‖² = √(π/2), ‖v‖² = √(π/2).
        let oracle = (PI / 6.0).sqrt() / (PI / 2.0).sqrt().powi(3);
        assert!((ratio - oracle).abs() < 1e-12);
        assert!(slack > 0.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(gns_check(&[0.0; 64], 0.1), Err(Error::DegenerateInput(_))));
        assert!(matches!(gns_check(&[1.0; 64], 0.1), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn random_profiles_respect_the_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let v = random_compact_profile(&mut rng, 2048, 0.01);
            let (ratio, _) = gns_check(&v, 0.01).unwrap();
            assert!(ratio <= gns_constant() + 1e-3);
        }
    }
}
