//! Randomized property suites shared by `selftest` and the acceptance gate. Each trial
//! draws from its own ChaCha stream, so outcomes do not depend on the thread count.

use std::f64::consts::PI;
use std::sync::Arc;

use fockgibbs::cgibbs::{gns_check, random_compact_profile};
use fockgibbs::fock::{enumerate_sector, BlockState, StateSector};
use fockgibbs::linalg::symmetric_eigen;
use fockgibbs::model::{gns_constant, CutoffProfile, ModelParams};
use fockgibbs::qgibbs::{
    bernoulli_product_bound, build_gibbs, cutoff_relative_partition, golden_thompson, peierls_bogoliubov,
    variational_functional,
};
use fockgibbs::semiclassics::{
    antiwick_radial_scalar, antiwick_sector_mc, berezin_lieb_check, definetti_gap, poisson_decomposition_check,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::LabResult;

/// Trials run, trials that violated the property, and the worst normalized margin seen.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub trials: usize,
    pub violations: usize,
    pub worst: f64,
}

impl SuiteOutcome {
    pub fn clean(&self) -> bool {
        self.violations == 0
    }

    fn collect(margins: Vec<(bool, f64)>) -> Self {
        Self {
            trials: margins.len(),
            violations: margins.iter().filter(|m| m.0).count(),
            worst: margins.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

fn stream(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Random block state on sectors `0..=top` with random eigenbases; `fill` is the
/// probability that an eigenvalue is nonzero.
pub fn random_block_state(rng: &mut ChaCha8Rng, k_max: usize, top: usize, fill: f64) -> BlockState {
    let mut raw = Vec::new();
    for n in 0..=top {
        let basis = Arc::new(enumerate_sector(k_max, n, usize::MAX).expect("small sector"));
        let dim = basis.len();
        let m = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        let (_, vectors) = symmetric_eigen(&(&m + m.transpose())).expect("small symmetric matrix");
        let w: Vec<f64> = (0..dim).map(|_| if rng.gen_bool(fill) { rng.gen_range(0.01..1.0) } else { 0.0 }).collect();
        raw.push((basis, vectors, w));
    }
    let mut total: f64 = raw.iter().map(|r| r.2.iter().sum::<f64>()).sum();
    if total == 0.0 {
        raw[0].2[0] = 1.0;
        total = 1.0;
    }
    let sectors = raw
        .into_iter()
        .map(|(b, v, w)| StateSector::new(b, Some(v), w.iter().map(|x| x / total).collect()).expect("valid sector"))
        .collect();
    BlockState::new(k_max, sectors).expect("valid state")
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&m + m.adjoint()) * Complex64::new(0.5 * scale, 0.0)
}

pub fn peierls_bogoliubov_suite(trials: usize, seed: u64) -> LabResult<SuiteOutcome> {
    let margins = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let dim = rng.gen_range(2..=8);
            let scale = rng.gen_range(0.1..3.0);
            let a = random_hermitian(&mut rng, dim, scale);
            let x = DVector::from_fn(dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let x = &x / Complex64::new(x.norm(), 0.0);
            let (lhs, rhs) = peierls_bogoliubov(&a, &x)?;
            let margin = (rhs - lhs) / rhs;
            Ok((margin > 1e-12, margin))
        })
        .collect::<LabResult<_>>()?;
    Ok(SuiteOutcome::collect(margins))
}

/// Golden–Thompson with `Z = ⊕ z_b 𝟙` and `X`, `Y` block diagonal in the same blocks.
pub fn golden_thompson_suite(trials: usize, seed: u64) -> LabResult<SuiteOutcome> {
    let margins = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let blocks: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=3)).collect();
            let dim: usize = blocks.iter().sum();
            let mut x = DMatrix::zeros(dim, dim);
            let mut y = DMatrix::zeros(dim, dim);
            let mut z = DMatrix::zeros(dim, dim);
            let mut at = 0;
            for &b in &blocks {
                let scale = rng.gen_range(0.1..2.0);
                x.view_mut((at, at), (b, b)).copy_from(&random_hermitian(&mut rng, b, scale));
                y.view_mut((at, at), (b, b)).copy_from(&random_hermitian(&mut rng, b, scale));
                let weight = Complex64::new(rng.gen_range(0.0..2.0), 0.0);
                z.view_mut((at, at), (b, b)).fill_diagonal(weight);
                at += b;
            }
            let (lhs, rhs) = golden_thompson(&z, &x, &y)?;
            let margin = (lhs - rhs) / rhs.abs().max(f64::MIN_POSITIVE);
            Ok((margin > 1e-12, margin))
        })
        .collect::<LabResult<_>>()?;
    Ok(SuiteOutcome::collect(margins))
}

/// Bernoulli product bound over `k_max ∈ 0..=5` and `τ ∈ {1, 10, 100, 1000}`.
pub fn bernoulli_suite() -> SuiteOutcome {
    let mut margins = Vec::new();
    for k_max in 0..=5 {
        for tau in [1.0, 10.0, 100.0, 1000.0] {
            let (lhs, rhs) = bernoulli_product_bound(k_max, tau);
            margins.push((lhs < rhs, rhs - lhs));
        }
    }
    SuiteOutcome::collect(margins)
}

pub fn definetti_suite(states: usize, seed: u64) -> SuiteOutcome {
    let mut margins: Vec<(bool, f64)> = (0..states)
        .into_par_iter()
        .flat_map_iter(|t| {
            let mut rng = stream(seed, t);
            let k_max = rng.gen_range(0..=1);
            let top = rng.gen_range(1..=3);
            let state = random_block_state(&mut rng, k_max, top, 0.7);
            let scale = rng.gen_range(0.05..1.0);
            (1..=2)
                .map(|k| {
                    let (l, r) = definetti_gap(&state, scale, k).expect("supported order");
                    ((l - r) > 1e-12 * r, (l - r) / r)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    margins.extend(vacuum_definetti_equality(0.3).into_iter().map(|err| (err > 1e-12, err)));
    SuiteOutcome::collect(margins)
}

/// `|lhs − ςJ|` and `|rhs − ςJ|` at order one for the vacuum on windows of 1 and 3 modes.
pub fn vacuum_definetti_equality(scale: f64) -> Vec<f64> {
    (0..=1)
        .map(|k_max| {
            let (l, r) = definetti_gap(&BlockState::vacuum(k_max), scale, 1).expect("order one");
            let target = scale * (2 * k_max + 1) as f64;
            (l - target).abs().max((r - target).abs()) / target
        })
        .collect()
}

/// Berezin–Lieb over random pairs: a sparse state against a full-rank reference.
pub fn berezin_lieb_suite(pairs: usize, samples: u64, seed: u64) -> LabResult<SuiteOutcome> {
    let margins = (0..pairs)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let k_max = rng.gen_range(0..=1);
            let top = rng.gen_range(1..=3);
            let gamma = random_block_state(&mut rng, k_max, top, 0.6);
            let reference = random_block_state(&mut rng, k_max, top, 1.0);
            let scale = rng.gen_range(0.2..1.0);
            let r = berezin_lieb_check(&gamma, &reference, scale, samples, seed.wrapping_add(t as u64))?;
            let margin = (r.classical.value - r.quantum) / r.classical.stderr.max(f64::MIN_POSITIVE);
            Ok((!r.holds(), margin))
        })
        .collect::<LabResult<Vec<_>>>()?;
    Ok(SuiteOutcome::collect(margins))
}

/// Coherent-state Poisson expansion against the eigen route; the margin is the relative
/// disagreement, a violation when it exceeds `1e−9`.
pub fn poisson_suite(configs: usize, seed: u64) -> LabResult<SuiteOutcome> {
    let margins = (0..configs)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let k_max = rng.gen_range(0..=1);
            let tau = rng.gen_range(5.0..=40.0);
            let k_cut = rng.gen_range(0.5..0.8);
            let params = ModelParams::new(tau, rng.gen_range(0.2..=1.0), 0.2 * k_cut * k_cut, k_cut, k_max)?;
            let cutoff = CutoffProfile::smooth(k_cut, params.eta)?;
            let modes = params.modes();
            let mass = rng.gen_range(0.0..k_cut * k_cut);
            let dir: Vec<Complex64> =
                (0..modes).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let norm = dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let u: Vec<Complex64> = dir.iter().map(|c| c * (mass.sqrt() / norm)).collect();
            let (l, r) = poisson_decomposition_check(&params, rng.gen_bool(0.8), &cutoff, &u)?;
            let rel = (l - r).abs() / l.abs().max(f64::MIN_POSITIVE);
            Ok((rel > 1e-9, rel))
        })
        .collect::<LabResult<Vec<_>>>()?;
    Ok(SuiteOutcome::collect(margins))
}

/// Radial anti-Wick operators on sectors `n ≤ 4` of one and two modes: every matrix entry of
/// the coherent-state integral must sit within 3 standard errors of `E[G(Y/τ)]·𝟙`. The
/// margin is the largest entry deviation in units of its standard error.
pub fn antiwick_suite(samples: u64, seed: u64) -> LabResult<SuiteOutcome> {
    let g = |x: f64| (1.0 + x) * (-x).exp();
    let tau = 3.0;
    let mut margins = Vec::new();
    for modes in 1..=2 {
        for n in 0..=4 {
            let scalar = antiwick_radial_scalar(g, &[], n, modes, tau)?;
            let (m, se) = antiwick_sector_mc(g, modes, n, tau, samples, seed.wrapping_add((10 * modes + n) as u64));
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let target = if i == j { scalar } else { 0.0 };
                    let z = (m[(i, j)] - target).norm() / se[(i, j)].max(f64::MIN_POSITIVE);
                    margins.push((z > 3.0, z));
                }
            }
        }
    }
    Ok(SuiteOutcome::collect(margins))
}

/// Sector-wise perturbation of `state`: each block is mixed with a random positive matrix
/// of relative size `size`, and the sector masses are rescaled at random.
pub fn perturb_state(state: &BlockState, rng: &mut ChaCha8Rng, size: f64) -> BlockState {
    let mut raw = Vec::new();
    for s in state.sectors().iter().filter(|s| s.mass() > 0.0) {
        let dim = s.dim();
        let r = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        let noise = &r * r.transpose() / dim as f64;
        let scale = s.mass() * rng.gen_range(0.5..1.5);
        let (values, vectors) = symmetric_eigen(&(s.density() / s.mass() * scale + noise * (size * scale)))
            .expect("small symmetric matrix");
        let w: Vec<f64> = values.iter().map(|x| x.max(0.0)).collect();
        raw.push((s.basis().clone(), vectors, w));
    }
    let total: f64 = raw.iter().map(|r| r.2.iter().sum::<f64>()).sum();
    let sectors = raw
        .into_iter()
        .map(|(b, v, w)| StateSector::new(b, Some(v), w.iter().map(|x| x / total).collect()).expect("valid sector"))
        .collect();
    BlockState::new(state.k_max(), sectors).expect("valid state")
}

/// Gibbs variational principle at `params`: the deviation of the functional at the Gibbs
/// state from `−log(𝒵^f/𝒵^f_0)`, and the gaps `F(Γ) − F(Γ*)` of random perturbations.
#[derive(Debug, Clone)]
pub struct VariationalOutcome {
    pub identity_error: f64,
    pub gaps: Vec<f64>,
}

impl VariationalOutcome {
    pub fn clean(&self) -> bool {
        self.identity_error <= 1e-8 && self.gaps.iter().all(|&g| g >= -1e-8)
    }

    pub fn min_gap(&self) -> f64 {
        self.gaps.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

pub fn variational_suite(perturbations: usize, seed: u64) -> LabResult<VariationalOutcome> {
    let params = ModelParams::new(10.0, 0.5, 0.1, 1.0, 1)?;
    let cutoff = CutoffProfile::smooth(1.0, 0.1)?;
    let gibbs = build_gibbs(&params, true, &cutoff)?.state()?;
    let reference = build_gibbs(&params, false, &cutoff)?.state()?;
    let at_min = variational_functional(&gibbs, &reference, &params)?;
    let identity_error = (at_min + cutoff_relative_partition(&params, &cutoff)?.ln()).abs();
    let gaps = (0..perturbations)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let size = [1e-3, 1e-2, 1e-1, 1.0][t % 4];
            let other = perturb_state(&gibbs, &mut rng, size);
            Ok(variational_functional(&other, &reference, &params)? - at_min)
        })
        .collect::<LabResult<Vec<_>>>()?;
    Ok(VariationalOutcome { identity_error, gaps })
}

/// Random compactly supported profiles against the sharp constant `4/π²`; the margin is
/// the ratio minus the constant, a violation when above `1e−3`.
pub fn gns_suite(trials: usize, seed: u64) -> LabResult<SuiteOutcome> {
    let dx = 0.01;
    let margins = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let v = random_compact_profile(&mut rng, 2048, dx);
            let (ratio, _) = gns_check(&v, dx)?;
            let margin = ratio - gns_constant();
            Ok((margin > 1e-3, margin))
        })
        .collect::<LabResult<Vec<_>>>()?;
    debug_assert!((gns_constant() - 4.0 / (PI * PI)).abs() < 1e-15);
    Ok(SuiteOutcome::collect(margins))
}
