use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cgibbs::sampling::{free_scales, sharded_accumulate, Merge, RatioMoments};
use crate::cgibbs::{default_grid_size, FieldSample, HartreeEnergy, LocalEnergy, MCEstimate};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::model::{critical_mass, CutoffProfile, ModelParams};

/// Interaction functional entering the classical weight `e^{energy(u)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interaction {
    None,
    Hartree,
    Local,
}

impl std::str::FromStr for Interaction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "hartree" => Ok(Self::Hartree),
            "local" => Ok(Self::Local),
            other => Err(Error::InvalidConfig(format!("unknown interaction `{other}`"))),
        }
    }
}

enum Energy {
    Zero,
    Hartree(HartreeEnergy),
    Local(LocalEnergy),
}

impl Energy {
    fn new(params: &ModelParams, interaction: Interaction) -> Result<Self> {
        Ok(match interaction {
            Interaction::None => Self::Zero,
            Interaction::Hartree => Self::Hartree(HartreeEnergy::new(params.k_max, &params.kernel, params.eps)),
            Interaction::Local => Self::Local(LocalEnergy::new(params.k_max, default_grid_size(params.k_max))?),
        })
    }

    fn eval(&self, u: &FieldSample) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Hartree(h) => h.eval(u),
            Self::Local(l) => l.eval(u),
        }
    }
}

fn check_inputs(interaction: Interaction, cutoff: &CutoffProfile, n_samples: u64) -> Result<()> {
    if n_samples < 2 {
        return Err(Error::InvalidConfig("at least two samples are required".into()));
    }
    if interaction != Interaction::None && cutoff.support_max().is_none() {
        return Err(Error::InvalidConfig("a focusing weight needs a cutoff with bounded support".into()));
    }
    Ok(())
}

/// Weight `e^{energy(u)}·f(‖u‖²)`, skipping the energy where the cutoff vanishes.
fn weight(energy: &Energy, cutoff: &CutoffProfile, u: &FieldSample) -> f64 {
    let f = cutoff.eval(u.mass);
    if f == 0.0 {
        0.0
    } else {
        f * energy.eval(u).exp()
    }
}

/// `∫ e^{energy(u)} f(‖u‖²) dμ₀` by sampling the free field.
pub fn classical_partition(
    params: &ModelParams,
    interaction: Interaction,
    cutoff: &CutoffProfile,
    n_samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    check_inputs(interaction, cutoff, n_samples)?;
    let energy = Energy::new(params, interaction)?;
    let acc = sharded_accumulate(
        &free_scales(params.k_max),
        n_samples,
        seed,
        || RatioMoments::new(0),
        |u, acc| acc.push(weight(&energy, cutoff, u), &[]),
    );
    Ok(acc.denominator(seed))
}

/// `∫ e^{energy(u)} dμ₀^f` against the cutoff-normalized free measure, as the ratio
/// `E[e^{energy} f]/E[f]`.
pub fn classical_relative_partition(
    params: &ModelParams,
    interaction: Interaction,
    cutoff: &CutoffProfile,
    n_samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    check_inputs(interaction, cutoff, n_samples)?;
    let energy = Energy::new(params, interaction)?;
    let acc = sharded_accumulate(
        &free_scales(params.k_max),
        n_samples,
        seed,
        || RatioMoments::new(1),
        |u, acc| {
            let f = cutoff.eval(u.mass);
            let w = if f == 0.0 { 0.0 } else { f * energy.eval(u).exp() };
            acc.push(f, &[w]);
        },
    );
    Ok(acc.ratio(0, seed))
}

/// One-body moment matrix `E_μ[α_i ᾱ_j]` of the normalized classical measure, indexed like
/// the quantum `Γ⁽¹⁾_{ij} = Tr(a†_j a_i Γ)`, with entrywise standard errors.
#[derive(Debug, Clone)]
pub struct MomentMatrixEstimate {
    pub value: DMatrix<Complex64>,
    pub stderr_re: DMatrix<f64>,
    pub stderr_im: DMatrix<f64>,
    pub n_samples: u64,
    pub seed: u64,
}

impl MomentMatrixEstimate {
    /// Trace-norm distance to a real symmetric matrix, with the error bound
    /// `√J·‖stderr‖_F` that `‖E‖₁ ≤ √J‖E‖_F` gives for the sampling error `E`.
    pub fn trace_distance(&self, other: &DMatrix<f64>) -> Result<(f64, f64)> {
        let diff = DMatrix::from_fn(self.value.nrows(), self.value.ncols(), |i, j| {
            self.value[(i, j)] - Complex64::new(other[(i, j)], 0.0)
        });
        let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
        let norm = hermitian_eigenvalues(&herm)?.iter().map(|e| e.abs()).sum();
        let frob = (self.stderr_re.norm_squared() + self.stderr_im.norm_squared()).sqrt();
        Ok((norm, (self.value.nrows() as f64).sqrt() * frob))
    }

    /// Hermitian part of the estimate.
    pub fn hermitian(&self) -> DMatrix<Complex64> {
        (&self.value + self.value.adjoint()) * Complex64::new(0.5, 0.0)
    }
}

pub fn classical_moment_matrix(
    params: &ModelParams,
    interaction: Interaction,
    cutoff: &CutoffProfile,
    n_samples: u64,
    seed: u64,
) -> Result<MomentMatrixEstimate> {
    check_inputs(interaction, cutoff, n_samples)?;
    let energy = Energy::new(params, interaction)?;
    let modes = params.modes();
    let acc = sharded_accumulate(
        &free_scales(params.k_max),
        n_samples,
        seed,
        || (RatioMoments::new(2 * modes * modes), vec![0.0; 2 * modes * modes]),
        |u, (acc, buf): &mut (RatioMoments, Vec<f64>)| {
            let w = weight(&energy, cutoff, u);
            for i in 0..modes {
                for j in 0..modes {
                    let m = u.coeffs[i] * u.coeffs[j].conj() * w;
                    buf[2 * (i * modes + j)] = m.re;
                    buf[2 * (i * modes + j) + 1] = m.im;
                }
            }
            acc.push(w, buf);
        },
    )
    .0;
    if acc.mean_den <= 0.0 {
        return Err(Error::NumericalFailure("no sample fell inside the cutoff support".into()));
    }
    let est = |i: usize, j: usize, part: usize| acc.ratio(2 * (i * modes + j) + part, seed);
    Ok(MomentMatrixEstimate {
        value: DMatrix::from_fn(modes, modes, |i, j| Complex64::new(est(i, j, 0).value, est(i, j, 1).value)),
        stderr_re: DMatrix::from_fn(modes, modes, |i, j| est(i, j, 0).stderr),
        stderr_im: DMatrix::from_fn(modes, modes, |i, j| est(i, j, 1).stderr),
        n_samples,
        seed,
    })
}

impl Merge for (RatioMoments, Vec<f64>) {
    fn merge(&mut self, other: &Self) {
        self.0.merge(&other.0)
    }
}

/// `∫ e^{min(𝒲^ε(u), R)} f(‖u‖²) dμ₀` with the Hartree energy capped at `r_cap`.
pub fn capped_partition(
    params: &ModelParams,
    r_cap: f64,
    cutoff: &CutoffProfile,
    n_samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    if r_cap.is_nan() || r_cap < 0.0 {
        return Err(Error::InvalidConfig(format!("energy cap must be nonnegative, got {r_cap}")));
    }
    check_inputs(Interaction::None, cutoff, n_samples)?;
    let energy = HartreeEnergy::new(params.k_max, &params.kernel, params.eps);
    let acc = sharded_accumulate(
        &free_scales(params.k_max),
        n_samples,
        seed,
        || RatioMoments::new(0),
        |u, acc| {
            let f = cutoff.eval(u.mass);
            let w = if f == 0.0 || r_cap == 0.0 { f } else { f * energy.eval(u).min(r_cap).exp() };
            acc.push(w, &[]);
        },
    );
    Ok(acc.denominator(seed))
}

/// `∫ e^{((1+ς)/6)‖u‖⁶_{L⁶}} 𝟙(‖u‖ ≤ K_s) dμ₀` on the window of `params`.
pub fn subcritical_moment(
    params: &ModelParams,
    k_s: f64,
    varsigma: f64,
    n_samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    if !(k_s >= 0.0 && k_s < critical_mass()) {
        return Err(Error::InvalidConfig(format!("mass level {k_s} must lie below the threshold {}", critical_mass())));
    }
    if !(varsigma >= 0.0 && varsigma.is_finite()) {
        return Err(Error::InvalidConfig(format!("exponent slack must be nonnegative, got {varsigma}")));
    }
    let cutoff = CutoffProfile::sharp(k_s)?;
    check_inputs(Interaction::Local, &cutoff, n_samples)?;
    let local = LocalEnergy::new(params.k_max, default_grid_size(params.k_max))?;
    let level = k_s * k_s;
    let acc = sharded_accumulate(
        &free_scales(params.k_max),
        n_samples,
        seed,
        || RatioMoments::new(0),
        |u, acc| {
            let w = if u.mass <= level { ((1.0 + varsigma) * local.eval(u)).exp() } else { 0.0 };
            acc.push(w, &[]);
        },
    );
    Ok(acc.denominator(seed))
}

/// Empirical law of `‖u‖²` under the free measure as bin counts on `edges`.
pub fn mass_histogram(k_max: usize, edges: &[f64], n_samples: u64, seed: u64) -> Vec<u64> {
    let bins = edges.len().saturating_sub(1);
    let counts = sharded_accumulate(
        &free_scales(k_max),
        n_samples,
        seed,
        || Counts(vec![0; bins]),
        |u, acc| {
            let b = edges.partition_point(|&e| e <= u.mass);
            if b >= 1 && b <= bins {
                acc.0[b - 1] += 1;
            }
        },
    );
    counts.0
}

struct Counts(Vec<u64>);

impl Merge for Counts {
    fn merge(&mut self, other: &Self) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a += b);
    }
}
