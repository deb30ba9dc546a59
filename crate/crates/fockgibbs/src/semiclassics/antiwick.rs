use nalgebra::DMatrix;
use num_complex::Complex64;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::cgibbs::{sharded_accumulate, RatioMoments};
use crate::error::{Error, Result};
use crate::fock::BlockState;
use crate::qgibbs::GibbsStateBlocks;
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};

/// `E[G(Y/τ)]` for `Y ~ Gamma(n+J, 1)`: the scalar by which the radial anti-Wick operator
/// with symbol `G(‖u‖²)` acts on sector `n`. `breaks` lists points (in units of `‖u‖²`)
/// where `G` is not smooth.
pub fn antiwick_radial_scalar<G: Fn(f64) -> f64>(
    g: G,
    breaks: &[f64],
    n: usize,
    modes: usize,
    tau: f64,
) -> Result<f64> {
    if modes == 0 || !(tau > 0.0) {
        return Err(Error::InvalidConfig("need at least one mode and a positive scale".into()));
    }
    let a = (n + modes) as f64;
    let log_norm = ln_gamma(a);
    let density = |y: f64| if y <= 0.0 { 0.0 } else { ((a - 1.0) * y.ln() - y - log_norm).exp() };
    let integrand = |y: f64| g(y / tau) * density(y);
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 };
    let mut points: Vec<f64> = breaks.iter().map(|b| b * tau).filter(|&y| y > 0.0).collect();
    // The Gamma bulk sits near its mode; splitting there keeps the panels balanced.
    points.push(a - 1.0);
    points.push(0.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut total = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            total += integrate(integrand, w[0], w[1], opts)?;
        }
    }
    total += integrate_to_infinity(integrand, *points.last().unwrap(), opts)?;
    if !total.is_finite() {
        return Err(Error::QuadratureFailure("radial symbol is not integrable against the Gamma law".into()));
    }
    Ok(total)
}

/// Occupation vectors of `n` bosons in `modes` modes.
pub(crate) fn occupations(modes: usize, n: usize) -> Vec<Vec<u32>> {
    if modes == 1 {
        return vec![vec![n as u32]];
    }
    let mut out = Vec::new();
    for first in (0..=n).rev() {
        for mut rest in occupations(modes - 1, n - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

/// Sector-`n` block of the anti-Wick operator `(τ/π)^J ∫ G(‖u‖²)|ξ(√τu)⟩⟨ξ(√τu)| du` on `ℂ^J`,
/// estimated by sampling `u` from the Gaussian `(τ/π)^J e^{−τ‖u‖²}`. Returns the matrix of
/// means and the entrywise standard errors (real and imaginary parts combined).
pub fn antiwick_sector_mc<G: Fn(f64) -> f64 + Sync>(
    g: G,
    modes: usize,
    n: usize,
    tau: f64,
    n_samples: u64,
    seed: u64,
) -> (DMatrix<Complex64>, DMatrix<f64>) {
    let occ = occupations(modes, n);
    let dim = occ.len();
    let fact: Vec<f64> = (0..=n).map(|m| ln_gamma(m as f64 + 1.0)).collect();
    let scales = vec![(0.5 / tau).sqrt(); modes];
    let acc = sharded_accumulate(
        &scales,
        n_samples,
        seed,
        || RatioMoments::new(2 * dim * dim),
        |u, acc| {
            let gv = g(u.mass) * tau.powi(n as i32);
            let mono: Vec<Complex64> = occ
                .iter()
                .map(|m| {
                    let log_scale: f64 = m.iter().map(|&k| -0.5 * fact[k as usize]).sum();
                    m.iter().zip(&u.coeffs).map(|(&k, c)| c.powu(k)).product::<Complex64>() * log_scale.exp()
                })
                .collect();
            let mut buf = vec![0.0; 2 * dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    let e = mono[i].conj() * mono[j] * gv;
                    buf[2 * (i * dim + j)] = e.re;
                    buf[2 * (i * dim + j) + 1] = e.im;
                }
            }
            acc.push(1.0, &buf);
        },
    );
    let value = DMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(acc.ratio(2 * (i * dim + j), seed).value, acc.ratio(2 * (i * dim + j) + 1, seed).value)
    });
    let stderr = DMatrix::from_fn(dim, dim, |i, j| {
        let (a, b) = (acc.ratio(2 * (i * dim + j), seed).stderr, acc.ratio(2 * (i * dim + j) + 1, seed).stderr);
        a.hypot(b)
    });
    (value, stderr)
}

/// `Σ_n P(𝒩=n) E[(Y_n/τ)³ 𝟙(Y_n > Rτ)]`, `Y_n ~ Gamma(n+J, 1)`, for sector masses `P(𝒩=n)`:
/// the sextic tail `∫_{‖u‖²>R} ‖u‖⁶ dμ` of the Husimi measure at scale `1/τ`.
pub fn tail_moment_masses(masses: &[(usize, f64)], modes: usize, r: f64, tau: f64) -> f64 {
    masses
        .iter()
        .map(|&(n, p)| {
            let a = (n + modes) as f64;
            let q = if r <= 0.0 { 1.0 } else { gamma_ur(a + 3.0, r * tau) };
            p * a * (a + 1.0) * (a + 2.0) / tau.powi(3) * q
        })
        .sum()
}

/// Sextic Husimi tail beyond `‖u‖² = R` of a Gibbs state whose cutoff lives on `[0, K²]`,
/// `K² < R`.
pub fn tail_moment(blocks: &GibbsStateBlocks, r: f64) -> Result<f64> {
    let p = &blocks.params;
    let level = match blocks.cutoff.support_max() {
        Some(s) => s,
        None => return Err(Error::SupportViolation("cutoff has unbounded support".into())),
    };
    if r <= level {
        return Err(Error::InvalidConfig(format!("tail level {r} must exceed the cutoff level {level}")));
    }
    let masses = blocks.sector_masses();
    if let Some(&(n, _)) = masses.iter().filter(|m| m.1 > 0.0).find(|m| m.0 as f64 > level * p.tau) {
        return Err(Error::SupportViolation(format!("state charges sector {n} beyond K²τ = {}", level * p.tau)));
    }
    Ok(tail_moment_masses(&masses, p.modes(), r, p.tau))
}

/// Sector masses of a block state.
pub fn block_masses(state: &BlockState) -> Vec<(usize, f64)> {
    state.sectors().iter().map(|s| (s.n(), s.mass())).collect()
}
