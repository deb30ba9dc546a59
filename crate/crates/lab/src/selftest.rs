//! Closed-form and structural examples across the engine, plus small runs of every
//! randomized suite. A failing check never aborts the remaining ones.

use std::f64::consts::PI;

use fockgibbs::cgibbs::gns_check;
use fockgibbs::cgibbs::{
    capped_partition, classical_moment_matrix, classical_partition, free_scales, hartree_energy, local_energy,
    sharded_moments, subcritical_moment, FieldSample, Interaction, MassLaw,
};
use fockgibbs::fock::{
    assemble_interaction, assemble_kinetic, enumerate_sector, ladder_matrix, ladder_matrix_element, one_body_matrix,
    BlockState, Ladder, OccupationVector,
};
use fockgibbs::linalg::symmetric_eigenvalues;
use fockgibbs::model::{
    eigenvalue, mode_count, mode_index, soliton, trace_h_inverse, CutoffProfile, KernelSpec, ModelParams,
};
use fockgibbs::qgibbs::{
    build_gibbs, free_reference_cutoff, log_free_partition, log_free_partition_exact, reduced_density_matrix,
    relative_entropy, relative_partition,
};
use fockgibbs::semiclassics::{
    antiwick_radial_scalar, berezin_lieb_check, coherent_vector, husimi_density, poisson_decomposition_check,
    tail_moment_masses,
};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::{Coupling, CutoffKind, ExperimentConfig, ExperimentKind};
use crate::error::LabResult;
use crate::experiments::{exp_density_convergence, exp_partition_convergence, free_rate_error};
use crate::report::{Check, Report, Table};
use crate::suites;

type Outcome = LabResult<(bool, String)>;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn sector(k_max: usize, n: usize) -> fockgibbs::fock::SectorBasis {
    enumerate_sector(k_max, n, usize::MAX).expect("small sector")
}

fn spectrum_examples() -> Outcome {
    let even = eigenvalue(-1) == eigenvalue(1);
    let single = trace_h_inverse(Some(0));
    Ok((even && close(single, 2.0, 1e-15), format!("λ₋₁ = λ₁: {even}, Tr h⁻¹ on one mode = {single}")))
}

fn cutoff_and_kernel() -> Outcome {
    let f = CutoffProfile::smooth(1.0, 0.2)?;
    let (plateau, outside) = (f.eval(0.5), f.eval(1.1));
    let mass = KernelSpec::default().fourier(0.5, 0);
    Ok((
        plateau == 1.0 && outside == 0.0 && close(mass, 1.0, 1e-12),
        format!("f(0.5) = {plateau}, f(1.1) = {outside}, ŵ(0) = {mass}"),
    ))
}

fn sectors_and_ladders() -> Outcome {
    let sizes = (sector(0, 3).len(), sector(1, 0).len());
    let vac = OccupationVector::vacuum(1);
    let (up, amp) = ladder_matrix_element(&vac, 0, Ladder::Create);
    let mut expected = vec![0u32; 3];
    expected[mode_index(0, 1)] = 1;
    let (_, down) = ladder_matrix_element(&vac, 0, Ladder::Annihilate);
    let ok = sizes == (1, 1) && up.counts() == expected.as_slice() && amp == 1.0 && down == 0.0;
    Ok((ok, format!("sector sizes {sizes:?}, a†₀|0⟩ amplitude {amp}, a₀|0⟩ amplitude {down}")))
}

fn sector_operators() -> Outcome {
    let kinetic = assemble_kinetic(&sector(1, 0)).matrix;
    let pair = assemble_interaction(&sector(1, 2), &KernelSpec::default(), 0.5).matrix;
    let ok = kinetic.shape() == (1, 1) && kinetic[(0, 0)] == 0.0 && pair.amax() == 0.0;
    Ok((ok, format!("vacuum kinetic {:?}, two-particle interaction max {}", kinetic.as_slice(), pair.amax())))
}

fn one_body_examples() -> Outcome {
    let vac = one_body_matrix(&BlockState::vacuum(1));
    let one = one_body_matrix(&BlockState::diagonal(0, &[(vec![1], 1.0)])?);
    let ok = vac.amax() == 0.0 && one.shape() == (1, 1) && one[(0, 0)] == 1.0;
    Ok((ok, format!("vacuum max {}, |1⟩ gives {:?}", vac.amax(), one.as_slice())))
}

/// Canonical commutation relations `[a_i, a†_j] = δ_ij` on sectors 1..=3 of three modes.
fn commutators() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let (lo, mid, hi) = (sector(1, n - 1), sector(1, n), sector(1, n + 1));
        for i in 0..3 {
            for j in 0..3 {
                let first =
                    ladder_matrix(&hi, &mid, i, Ladder::Annihilate)? * ladder_matrix(&mid, &hi, j, Ladder::Create)?;
                let second =
                    ladder_matrix(&lo, &mid, j, Ladder::Create)? * ladder_matrix(&mid, &lo, i, Ladder::Annihilate)?;
                let delta = if i == j { 1.0 } else { 0.0 };
                let target = DMatrix::<f64>::identity(mid.len(), mid.len()) * delta;
                worst = worst.max((first - second - target).amax());
            }
        }
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.3e}")))
}

fn interaction_positive() -> Outcome {
    let mut lowest = f64::INFINITY;
    for n in 3..=6 {
        let w = assemble_interaction(&sector(1, n), &KernelSpec::default(), 0.5).matrix;
        let scale = w.amax().max(1.0);
        lowest = lowest.min(symmetric_eigenvalues(&w)?.min() / scale);
    }
    Ok((lowest >= -1e-12, format!("smallest relative eigenvalue {lowest:.3e}")))
}

fn gibbs_examples() -> Outcome {
    let cut = CutoffProfile::ConstantOne;
    let two = ModelParams::new(10.0, 0.5, 0.1, 0.6, 1)?.with_n_max(2)?;
    let (a, b) = (build_gibbs(&two, true, &cut)?, build_gibbs(&two, false, &cut)?);
    let same = a.log_partition() == b.log_partition() && a.sector_masses() == b.sector_masses();

    let full = ModelParams::new(10.0, 0.5, 0.1, 0.6, 1)?.with_n_max(free_reference_cutoff(1, 10.0, 1e-12))?;
    let unit = relative_partition(&full, false, &cut)?;

    let sharp = CutoffProfile::sharp(0.4)?;
    let low = ModelParams::new(10.0, 0.5, 0.05, 0.4, 1)?;
    let truncated = relative_partition(&low, true, &sharp)?;
    let oracle = (log_free_partition(1, 10.0, &sharp) - log_free_partition_exact(1, 10.0)).exp();
    let ok = same && close(unit, 1.0, 1e-10) && close(truncated, oracle, 1e-12) && truncated > 0.0 && truncated < 1.0;
    Ok((ok, format!("n ≤ 2 interacting = free: {same}; free ratio {unit}; truncated ratio {truncated} vs {oracle}")))
}

fn state_observables() -> Outcome {
    let p = ModelParams::new(10.0, 0.5, 0.01, 0.3, 1)?;
    let blocks = build_gibbs(&p, true, &CutoffProfile::sharp(0.3)?)?;
    let (m0, m1) = (blocks.particle_moment(0), blocks.particle_moment(1));
    let state = blocks.state()?;
    let gamma = reduced_density_matrix(&state, 1, None)?;
    let other =
        build_gibbs(&ModelParams::new(10.0, 0.5, 0.1, 0.6, 1)?, true, &CutoffProfile::smooth(0.6, 0.1)?)?.state()?;
    let entropy = relative_entropy(&other, &other)?;
    let ok = close(m0, 1.0, 1e-14) && m1 == 0.0 && gamma.amax() == 0.0 && entropy.abs() < 1e-12;
    Ok((ok, format!("E[𝒩⁰] = {m0}, vacuum E[𝒩] = {m1}, vacuum Γ⁽¹⁾ max {}, H(Γ, Γ) = {entropy:.2e}", gamma.amax())))
}

fn free_field_examples(samples: u64, seed: u64) -> Outcome {
    let moments = sharded_moments(&free_scales(1), samples, seed, 6, |u, out| {
        for (j, c) in u.coeffs.iter().enumerate() {
            out[2 * j] = c.re;
            out[2 * j + 1] = c.im;
        }
    });
    let worst = (0..6)
        .map(|i| {
            let e = moments.mean_estimate(i, seed);
            e.value.abs() / e.stderr
        })
        .fold(0.0, f64::max);
    let p = ModelParams::new(10.0, 0.5, 0.1, 0.6, 1)?;
    let z = classical_partition(&p, Interaction::None, &CutoffProfile::ConstantOne, samples, seed)?;
    let m = classical_moment_matrix(&p, Interaction::None, &CutoffProfile::ConstantOne, samples, seed)?;
    let mut off = 0.0f64;
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            off = off.max(m.value[(i, j)].re.abs() / m.stderr_re[(i, j)]);
            off = off.max(m.value[(i, j)].im.abs() / m.stderr_im[(i, j)]);
        }
    }
    let ok = worst <= 3.0 && close(z.value, 1.0, 1e-12) && off <= 3.0;
    Ok((ok, format!("max |E α|/stderr {worst:.2}, ∫dμ₀ = {}, max off-diagonal/stderr {off:.2}", z.value)))
}

fn energies() -> Outcome {
    let kernel = KernelSpec::default();
    let c = 0.7;
    let mut flat = vec![Complex64::new(0.0, 0.0); mode_count(1)];
    flat[mode_index(0, 1)] = Complex64::new(c, 0.0);
    let mut wave = vec![Complex64::new(0.0, 0.0); mode_count(1)];
    wave[mode_index(1, 1)] = Complex64::new(1.0, 0.0);
    let (flat, wave) = (FieldSample::new(flat), FieldSample::new(wave));
    let target = c.powi(6) / 6.0;
    let values = [
        local_energy(&flat, 64)?,
        hartree_energy(&flat, &kernel, 0.5),
        local_energy(&wave, 64)?,
        hartree_energy(&wave, &kernel, 0.5),
    ];
    let ok = close(values[0], target, 1e-14)
        && close(values[1], target, 1e-14)
        && close(values[2], 1.0 / 6.0, 1e-14)
        && close(values[3], 1.0 / 6.0, 1e-14);
    Ok((ok, format!("constant {:?} vs {target}, unimodular {:?} vs 1/6", &values[..2], &values[2..])))
}

fn mass_and_gns() -> Outcome {
    let origin = MassLaw::new(1).density(0.0)?;
    let q = soliton();
    let (n, dx) = (8192, 0.005);
    let x = |i: usize| (i as f64 - n as f64 / 2.0) * dx;
    let base: Vec<f64> = (0..n).map(|i| q.eval(x(i))).collect();
    let squeezed: Vec<f64> = (0..n).map(|i| q.eval(2.0 * x(i))).collect();
    let (r1, _) = gns_check(&base, dx)?;
    let (r2, _) = gns_check(&squeezed, dx)?;
    Ok((origin == 0.0 && close(r1, r2, 1e-6), format!("density(0) = {origin}, ratio Q {r1:.9}, Q(2·) {r2:.9}")))
}

fn capped_and_subcritical(samples: u64, seed: u64) -> Outcome {
    let p = ModelParams::new(4.0, 0.2, 0.1, 1.8, 1)?;
    let cut = CutoffProfile::smooth(1.8, 0.1)?;
    let zero = capped_partition(&p, 0.0, &cut, samples, seed)?;
    let free = classical_partition(&p, Interaction::None, &cut, samples, seed)?;
    let exact = MassLaw::new(1).cutoff_expectation(&cut)?;
    let caps: Vec<f64> = [0.0, 1.0, 5.0, 30.0]
        .iter()
        .map(|&r| capped_partition(&p, r, &cut, samples, seed).map(|e| e.value))
        .collect::<fockgibbs::Result<_>>()?;
    let monotone = caps.windows(2).all(|w| w[1] >= w[0]);
    let cap_ok = zero.value == free.value && close(zero.value, exact, 3.0 * zero.stderr) && monotone;

    let mut sub_ok = true;
    let mut detail = Vec::new();
    for k_s in [0.2, 0.6] {
        let m = subcritical_moment(&p, k_s, 0.0, samples, seed)?;
        let ball = classical_partition(&p, Interaction::None, &CutoffProfile::sharp(k_s)?, samples, seed)?;
        sub_ok &= m.value >= ball.value && (k_s > 0.5 || m.value <= 1.0);
        detail.push(format!("K_s = {k_s}: {:.4e} ≥ {:.4e}", m.value, ball.value));
    }
    Ok((cap_ok && sub_ok, format!("R = 0 gives {} vs {exact:.6}, caps {caps:?}; {}", zero.value, detail.join(", "))))
}

fn coherent_examples() -> Outcome {
    let zero = vec![Complex64::new(0.0, 0.0); 3];
    let xi = coherent_vector(&zero, 1.0, Some(3))?;
    let (_, amps) = xi.sector(0).expect("vacuum sector");
    let vacuum_amp = amps[0];
    let rest: f64 = (1..=3).map(|n| xi.sector_weight(n)).sum();

    let scale = 0.3;
    let u = vec![Complex64::new(0.2, -0.1), Complex64::new(0.4, 0.3), Complex64::new(-0.5, 0.0)];
    let mass: f64 = u.iter().map(|c| c.norm_sqr()).sum();
    let h = husimi_density(&BlockState::vacuum(1), scale, &u)?;
    let h_oracle = (scale * PI).powi(-3) * (-mass / scale).exp();

    let p = ModelParams::new(20.0, 0.5, 0.1, 0.6, 1)?;
    let cut = CutoffProfile::smooth(0.6, 0.1)?;
    let (l, r) = poisson_decomposition_check(&p, true, &cut, &zero)?;
    let ok = close(vacuum_amp.re, 1.0, 1e-15)
        && vacuum_amp.im == 0.0
        && rest == 0.0
        && close(h, h_oracle, 1e-14 * h_oracle)
        && l == cut.eval(0.0)
        && r == cut.eval(0.0);
    Ok((ok, format!("ξ(0) vacuum amplitude {vacuum_amp}, vacuum Husimi {h:.6e} vs {h_oracle:.6e}, Poisson ({l}, {r})")))
}

fn antiwick_examples() -> Outcome {
    let total = antiwick_radial_scalar(|_| 1.0, &[], 3, 2, 7.0)?;
    let masses = [(0, 0.2), (2, 0.5), (5, 0.3)];
    let tau: f64 = 10.0;
    let sixth: f64 = masses
        .iter()
        .map(|&(n, p)| {
            let a = (n + 3) as f64;
            p * a * (a + 1.0) * (a + 2.0) / tau.powi(3)
        })
        .sum();
    let near = tail_moment_masses(&masses, 3, 1e-12, tau);
    let ok = close(total, 1.0, 1e-12) && close(near, sixth, 1e-10 * sixth);
    Ok((ok, format!("G ≡ 1 gives {total}, R → 0⁺ tail {near:.10} vs sixth moment {sixth:.10}")))
}

fn berezin_equal_states(samples: u64, seed: u64) -> Outcome {
    let p = ModelParams::new(10.0, 0.5, 0.1, 0.6, 1)?;
    let s = build_gibbs(&p, true, &CutoffProfile::smooth(0.6, 0.1)?)?.state()?;
    let r = berezin_lieb_check(&s, &s, 0.1, samples, seed)?;
    let ok = r.quantum.abs() < 1e-12 && r.classical.value.abs() < 1e-12;
    Ok((ok, format!("quantum {:.2e}, classical {:.2e}", r.quantum, r.classical.value)))
}

fn experiment_trivials(config: &ExperimentConfig) -> Outcome {
    let mut free = ExperimentConfig::defaults(ExperimentKind::Partition);
    free.interaction = Coupling::None;
    free.samples = config.samples;
    free.seed = config.seed;
    let report = exp_partition_convergence(&free)?;
    let table = report.table("partition").expect("partition table");
    let unit = |name: &str| table.column(name).unwrap_or_default().iter().all(|v| close(*v, 1.0, 1e-10));
    let partition_ok = unit("q_ratio") && unit("c_value");

    let mut vacuum = ExperimentConfig::defaults(ExperimentKind::Density);
    vacuum.k_max = 0;
    vacuum.k_cut = 0.11;
    vacuum.eta = vec![0.001];
    vacuum.cutoff = CutoffKind::Sharp;
    vacuum.samples = config.samples;
    vacuum.seed = config.seed;
    let report = exp_density_convergence(&vacuum)?;
    let dist = report.table("density").and_then(|t| t.column("trace_distance")).unwrap_or_default();
    let density_ok = !dist.is_empty() && dist.iter().all(|d| *d <= 0.0121);

    let (q, c) = free_rate_error(1, 100.0, &CutoffProfile::ConstantOne)?;
    let rate_ok = (q - c).abs() < 1e-7;
    Ok((
        partition_ok && density_ok && rate_ok,
        format!(
            "free partition columns unit: {partition_ok}; vacuum-forcing distances {dist:?}; constant-cutoff rate error {:.2e}",
            (q - c).abs()
        ),
    ))
}

fn suite_line(o: &suites::SuiteOutcome) -> (bool, String) {
    (o.clean(), format!("{} violations over {} trials, worst margin {:.3e}", o.violations, o.trials, o.worst))
}

/// Runs every check; a check that errors is reported as failed with its error message.
type Case<'a> = Box<dyn Fn() -> Outcome + 'a>;

pub fn run(config: &ExperimentConfig) -> LabResult<Report> {
    let (n, seed) = (config.samples, config.seed);
    let cases: Vec<(&str, Case<'_>)> = vec![
        ("spectrum", Box::new(spectrum_examples)),
        ("cutoff and kernel", Box::new(cutoff_and_kernel)),
        ("sectors and ladders", Box::new(sectors_and_ladders)),
        ("sector operators", Box::new(sector_operators)),
        ("one-body matrix", Box::new(one_body_examples)),
        ("commutation relations", Box::new(commutators)),
        ("interaction positivity", Box::new(interaction_positive)),
        ("gibbs blocks", Box::new(gibbs_examples)),
        ("state observables", Box::new(state_observables)),
        ("free field", Box::new(move || free_field_examples(n, seed))),
        ("field energies", Box::new(energies)),
        ("mass law and gns", Box::new(mass_and_gns)),
        ("capped and subcritical", Box::new(move || capped_and_subcritical(n, seed))),
        ("coherent states", Box::new(coherent_examples)),
        ("anti-wick", Box::new(antiwick_examples)),
        ("berezin-lieb equal states", Box::new(move || berezin_equal_states(n.min(2000), seed))),
        ("experiment limits", Box::new(move || experiment_trivials(config))),
        ("peierls-bogoliubov suite", Box::new(move || Ok(suite_line(&suites::peierls_bogoliubov_suite(20, seed)?)))),
        ("golden-thompson suite", Box::new(move || Ok(suite_line(&suites::golden_thompson_suite(20, seed)?)))),
        ("bernoulli suite", Box::new(|| Ok(suite_line(&suites::bernoulli_suite())))),
        ("de finetti suite", Box::new(move || Ok(suite_line(&suites::definetti_suite(10, seed))))),
        ("berezin-lieb suite", Box::new(move || Ok(suite_line(&suites::berezin_lieb_suite(5, n.min(5000), seed)?)))),
        ("poisson suite", Box::new(move || Ok(suite_line(&suites::poisson_suite(5, seed)?)))),
        ("anti-wick suite", Box::new(move || Ok(suite_line(&suites::antiwick_suite(n, seed)?)))),
        ("gns suite", Box::new(move || Ok(suite_line(&suites::gns_suite(50, seed)?)))),
        (
            "variational suite",
            Box::new(move || {
                let v = suites::variational_suite(4, seed)?;
                Ok((v.clean(), format!("identity error {:.2e}, min gap {:.3e}", v.identity_error, v.min_gap())))
            }),
        ),
        ("hartree to local", Box::new(move || hartree_to_local(n, seed))),
        ("sharp cutoff continuity", Box::new(move || sharp_continuity(n, seed))),
    ];
    let mut table = Table::new("selftest", &["check", "passed", "detail"]);
    let mut checks = Vec::new();
    for (name, case) in cases {
        let (passed, detail) = case().unwrap_or_else(|e| (false, format!("error: {e}")));
        table.push(vec![name.into(), passed.into(), detail.as_str().into()]);
        checks.push(Check::new(name, passed, detail));
    }
    Ok(Report { tables: vec![table], checks })
}

/// Pathwise `|𝒲^ε(u) − 𝒲(u)|` averaged over free samples shrinks as `ε → 0`.
fn hartree_to_local(samples: u64, seed: u64) -> Outcome {
    let kernel = KernelSpec::default();
    let n = samples.min(5000);
    let gaps: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
        .iter()
        .map(|&eps| {
            let m = sharded_moments(&free_scales(1), n, seed, 1, |u, out| {
                out[0] = (hartree_energy(u, &kernel, eps) - local_energy(u, 64).expect("grid")).abs();
            });
            m.mean_estimate(0, seed).value
        })
        .collect();
    let ok = gaps.windows(2).all(|w| w[1] < w[0]);
    Ok((ok, format!("mean |𝒲^ε − 𝒲| = {gaps:?} along ε = [0.4, 0.2, 0.1, 0.05]")))
}

/// Smooth-cutoff partition ratios approach the sharp-cutoff one as `η → 0` at `K = 1`.
fn sharp_continuity(samples: u64, seed: u64) -> Outcome {
    let p = ModelParams::new(10.0, 0.5, 0.05, 1.0, 1)?;
    let sharp = classical_partition(&p, Interaction::Hartree, &CutoffProfile::sharp(1.0)?, samples, seed)?;
    let gaps: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&eta| {
            let smooth =
                classical_partition(&p, Interaction::Hartree, &CutoffProfile::smooth(1.0, eta)?, samples, seed)?;
            Ok((smooth.value - sharp.value).abs())
        })
        .collect::<LabResult<_>>()?;
    let ok = gaps.windows(2).all(|w| w[1] < w[0]);
    Ok((ok, format!("|smooth − sharp| = {gaps:?} along η = [0.2, 0.1, 0.05]")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass_at_default_size() {
        let report = run(&ExperimentConfig::defaults(ExperimentKind::Selftest)).unwrap();
        let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| c.to_string()).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
