use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::model::{eigenvalue, mode_count, mode_of_index};

/// Samples per shard; each shard owns the ChaCha stream numbered by its index.
pub const SHARD_SIZE: u64 = 1 << 16;

/// Fourier coefficients `α_k`, `|k| ≤ k_max`, of a classical field with its cached mass.
#[derive(Debug, Clone)]
pub struct FieldSample {
    pub coeffs: Vec<Complex64>,
    pub mass: f64,
    /// `(seed, shard)` of the generating stream, when drawn by the sharded sampler.
    pub provenance: Option<(u64, u64)>,
}

impl FieldSample {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mass = coeffs.iter().map(|c| c.norm_sqr()).sum();
        Self { coeffs, mass, provenance: None }
    }

    pub fn k_max(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    /// Field value `Σ_k α_k e^{2πikx}`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let k_max = self.k_max();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| {
                a * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * mode_of_index(j, k_max) as f64 * x)
            })
            .sum()
    }
}

/// Standard deviations `1/√(2λ_k)` of the real and imaginary parts under the free measure.
pub fn free_scales(k_max: usize) -> Vec<f64> {
    (0..mode_count(k_max)).map(|j| (0.5 / eigenvalue(mode_of_index(j, k_max))).sqrt()).collect()
}

/// Draws from `⊗_k (λ_k/π) e^{−λ_k|α_k|²} dα_k`.
pub fn sample_free_field<R: Rng + ?Sized>(k_max: usize, rng: &mut R) -> FieldSample {
    sample_with_scales(&free_scales(k_max), rng)
}

/// Independent complex Gaussians whose real and imaginary parts have standard deviations `scales`.
pub fn sample_with_scales<R: Rng + ?Sized>(scales: &[f64], rng: &mut R) -> FieldSample {
    let coeffs: Vec<Complex64> = scales
        .iter()
        .map(|s| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        })
        .collect();
    FieldSample::new(coeffs)
}

/// Monte-Carlo value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Running mean and co-moment matrix of a vector observable, mergeable in any grouping.
#[derive(Debug, Clone)]
pub struct Moments {
    pub count: u64,
    pub mean: Vec<f64>,
    /// Row-major `Σ (x_i − x̄_i)(x_j − x̄_j)`.
    pub comoment: Vec<f64>,
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        Self { count: 0, mean: vec![0.0; dim], comoment: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn push(&mut self, x: &[f64]) {
        let d = self.dim();
        self.count += 1;
        let n = self.count as f64;
        let delta: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        for i in 0..d {
            self.mean[i] += delta[i] / n;
        }
        for i in 0..d {
            let after = x[i] - self.mean[i];
            for j in 0..d {
                self.comoment[i * d + j] += delta[j] * after;
            }
        }
    }

    /// Chan's pairwise combination.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let d = self.dim();
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        for i in 0..d {
            for j in 0..d {
                self.comoment[i * d + j] += other.comoment[i * d + j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        for i in 0..d {
            self.mean[i] += delta[i] * nb / n;
        }
        self.count += other.count;
    }

    /// Sample covariance of components `i` and `j`.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.comoment[i * self.dim() + j] / (self.count - 1) as f64
    }

    pub fn mean_estimate(&self, i: usize, seed: u64) -> MCEstimate {
        MCEstimate {
            value: self.mean[i],
            stderr: (self.covariance(i, i).max(0.0) / self.count as f64).sqrt(),
            n_samples: self.count,
            seed,
        }
    }

    /// Delta-method estimate of `E[x_num]/E[x_den]`.
    pub fn ratio_estimate(&self, num: usize, den: usize, seed: u64) -> MCEstimate {
        let (x, y) = (self.mean[num], self.mean[den]);
        let r = x / y;
        let var = self.covariance(num, num) - 2.0 * r * self.covariance(num, den) + r * r * self.covariance(den, den);
        MCEstimate {
            value: r,
            stderr: (var.max(0.0) / self.count as f64).sqrt() / y.abs(),
            n_samples: self.count,
            seed,
        }
    }
}

/// Accumulators that combine partial results from disjoint sample shards.
pub trait Merge {
    fn merge(&mut self, other: &Self);
}

impl Merge for Moments {
    fn merge(&mut self, other: &Self) {
        Moments::merge(self, other)
    }
}

/// Runs `step` `n_samples` times with a ChaCha stream per shard of [`SHARD_SIZE`] draws.
/// Shards run in parallel and are merged in shard order, so the result depends only on
/// `(seed, n_samples)`.
pub fn sharded_fold<A, M, F>(n_samples: u64, seed: u64, make: M, step: F) -> A
where
    A: Merge + Send,
    M: Fn() -> A + Sync,
    F: Fn(&mut ChaCha8Rng, u64, &mut A) + Sync,
{
    let shards = n_samples.div_ceil(SHARD_SIZE);
    let parts: Vec<A> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = SHARD_SIZE.min(n_samples - shard * SHARD_SIZE);
            let mut acc = make();
            for _ in 0..count {
                step(&mut rng, shard, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = make();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Folds `observe` over `n_samples` free-type fields with per-component standard
/// deviations `scales`.
pub fn sharded_accumulate<A, M, F>(scales: &[f64], n_samples: u64, seed: u64, make: M, observe: F) -> A
where
    A: Merge + Send,
    M: Fn() -> A + Sync,
    F: Fn(&FieldSample, &mut A) + Sync,
{
    sharded_fold(n_samples, seed, make, |rng, shard, acc| {
        let mut u = sample_with_scales(scales, rng);
        u.provenance = Some((seed, shard));
        observe(&u, acc);
    })
}

/// Mean and co-moments of a `dim`-vector observable over the sharded sampler.
pub fn sharded_moments<F>(scales: &[f64], n_samples: u64, seed: u64, dim: usize, observe: F) -> Moments
where
    F: Fn(&FieldSample, &mut [f64]) + Sync,
{
    sharded_accumulate(
        scales,
        n_samples,
        seed,
        || (Moments::new(dim), vec![0.0; dim]),
        |u, (acc, buf): &mut (Moments, Vec<f64>)| {
            observe(u, buf);
            acc.push(buf);
        },
    )
    .0
}

impl Merge for (Moments, Vec<f64>) {
    fn merge(&mut self, other: &Self) {
        self.0.merge(&other.0)
    }
}

/// Per-component statistics of `E[x_i]/E[y]` for many numerators sharing one denominator,
/// keeping only the co-moments the delta method needs.
#[derive(Debug, Clone)]
pub struct RatioMoments {
    pub count: u64,
    pub mean_den: f64,
    m2_den: f64,
    pub means: Vec<f64>,
    m2: Vec<f64>,
    co: Vec<f64>,
}

impl RatioMoments {
    pub fn new(dim: usize) -> Self {
        Self { count: 0, mean_den: 0.0, m2_den: 0.0, means: vec![0.0; dim], m2: vec![0.0; dim], co: vec![0.0; dim] }
    }

    pub fn push(&mut self, den: f64, nums: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        let dy = den - self.mean_den;
        self.mean_den += dy / n;
        let dy_after = den - self.mean_den;
        self.m2_den += dy * dy_after;
        for (i, &x) in nums.iter().enumerate() {
            let dx = x - self.means[i];
            self.means[i] += dx / n;
            self.m2[i] += dx * (x - self.means[i]);
            self.co[i] += dx * dy_after;
        }
    }

    /// Delta-method estimate of `E[x_i]/E[y]`.
    pub fn ratio(&self, i: usize, seed: u64) -> MCEstimate {
        let r = self.means[i] / self.mean_den;
        let dof = (self.count.max(2) - 1) as f64;
        let var = (self.m2[i] - 2.0 * r * self.co[i] + r * r * self.m2_den) / dof;
        MCEstimate {
            value: r,
            stderr: (var.max(0.0) / self.count as f64).sqrt() / self.mean_den.abs(),
            n_samples: self.count,
            seed,
        }
    }

    pub fn denominator(&self, seed: u64) -> MCEstimate {
        let dof = (self.count.max(2) - 1) as f64;
        MCEstimate {
            value: self.mean_den,
            stderr: (self.m2_den.max(0.0) / dof / self.count as f64).sqrt(),
            n_samples: self.count,
            seed,
        }
    }
}

impl Merge for RatioMoments {
    fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let dy = other.mean_den - self.mean_den;
        for i in 0..self.means.len() {
            let dx = other.means[i] - self.means[i];
            self.m2[i] += other.m2[i] + dx * dx * na * nb / n;
            self.co[i] += other.co[i] + dx * dy * na * nb / n;
            self.means[i] += dx * nb / n;
        }
        self.m2_den += other.m2_den + dy * dy * na * nb / n;
        self.mean_den += dy * nb / n;
        self.count += other.count;
    }
}
