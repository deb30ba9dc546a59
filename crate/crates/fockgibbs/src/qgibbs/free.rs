use crate::model::{eigenvalue, mode_count, mode_of_index, CutoffProfile};

/// Boltzmann ratios `q_j = e^{−λ_j/τ}` of the window modes.
pub fn free_ratios(k_max: usize, tau: f64) -> Vec<f64> {
    (0..mode_count(k_max)).map(|j| (-eigenvalue(mode_of_index(j, k_max)) / tau).exp()).collect()
}

/// `log h_n(q)` for `n = 0..=n_max`, where `h_n` is the complete homogeneous
/// symmetric polynomial, i.e. the free trace `Tr e^{−dΓ(h)/τ}` on sector `n`.
pub fn log_free_sector_traces(k_max: usize, tau: f64, n_max: usize) -> Vec<f64> {
    let q = free_ratios(k_max, tau);
    let top = q.iter().cloned().fold(0.0, f64::max);
    // g_n = h_n / top^n obeys b(n) = a(n) + (q/top)·b(n−1) one mode at a time.
    let mut g = vec![0.0; n_max + 1];
    g[0] = 1.0;
    let mut first = true;
    for &qj in &q {
        let r = qj / top;
        if first {
            for (n, v) in g.iter_mut().enumerate() {
                *v = r.powi(n as i32);
            }
            first = false;
            continue;
        }
        for n in 1..=n_max {
            g[n] += r * g[n - 1];
        }
    }
    g.iter().enumerate().map(|(n, v)| v.ln() + n as f64 * top.ln()).collect()
}

/// `log Π_j (1 − q_j)^{−1}`, the free partition function without a number cutoff.
pub fn log_free_partition_exact(k_max: usize, tau: f64) -> f64 {
    free_ratios(k_max, tau).iter().map(|q| -(-q).ln_1p()).sum()
}

/// Chernoff bound `min_s E[s^𝒩] s^{−(N+1)}` on the free probability that `𝒩 > N`.
pub fn free_tail_bound(k_max: usize, tau: f64, n: usize) -> f64 {
    let q = free_ratios(k_max, tau);
    let top = q.iter().cloned().fold(0.0, f64::max);
    let log_bound = |s: f64| -> f64 {
        q.iter().map(|&qj| (1.0 - qj).ln() - (1.0 - s * qj).ln()).sum::<f64>() - (n as f64 + 1.0) * s.ln()
    };
    // Golden-section search on the convex exponent over s ∈ (1, 1/top).
    let (mut a, mut b) = (1.0, 1.0 / top);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if log_bound(c) < log_bound(d) {
            b = d;
        } else {
            a = c;
        }
    }
    log_bound(0.5 * (a + b)).exp().min(1.0)
}

/// Smallest `N` whose certified free tail beyond `N` is below `tol`.
pub fn free_reference_cutoff(k_max: usize, tau: f64, tol: f64) -> usize {
    let mut n = 1usize;
    while free_tail_bound(k_max, tau, n) >= tol {
        n *= 2;
    }
    let (mut lo, mut hi) = (n / 2, n);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if free_tail_bound(k_max, tau, mid) < tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `log Σ_n f(n/τ) h_n` over the sectors a cutoff charges, truncated at the
/// certified free tail when the cutoff has unbounded support.
pub fn log_free_partition(k_max: usize, tau: f64, cutoff: &CutoffProfile) -> f64 {
    let n_max = match cutoff.support_max() {
        Some(s) => (s * tau).floor() as usize,
        None => free_reference_cutoff(k_max, tau, 1e-12),
    };
    let traces = log_free_sector_traces(k_max, tau, n_max);
    log_sum_exp(traces.iter().enumerate().map(|(n, t)| {
        let f = cutoff.eval(n as f64 / tau);
        if f > 0.0 {
            t + f.ln()
        } else {
            f64::NEG_INFINITY
        }
    }))
}

pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let v: Vec<f64> = terms.into_iter().collect();
    let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + v.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{assemble_kinetic, enumerate_sector};

    #[test]
    fn traces_match_enumeration() {
        for k_max in 0..=2 {
            let tau = 7.0;
            let logs = log_free_sector_traces(k_max, tau, 12);
            for n in 0..=12 {
                let b = enumerate_sector(k_max, n, 100_000).unwrap();
                let k = assemble_kinetic(&b);
                let direct: f64 = k.matrix.diagonal().iter().map(|e| (-e / tau).exp()).sum();
                assert!((logs[n] - direct.ln()).abs() < 1e-12, "k_max={k_max} n={n}");
            }
        }
    }

    #[test]
    fn geometric_single_mode() {
        let q = (-0.05f64).exp();
        let logs = log_free_sector_traces(0, 10.0, 400);
        let z: f64 = logs.iter().map(|l| l.exp()).sum();
        let oracle: f64 = (0..=400).map(|n| q.powi(n)).sum();
        assert!((z - oracle).abs() < 1e-10 * oracle);
        assert!((z - 20.5042).abs() < 1e-3);
    }

    #[test]
    fn tail_bound_is_certified() {
        for k_max in 0..=1 {
            let tau = 10.0;
            let n = free_reference_cutoff(k_max, tau, 1e-12);
            let logs = log_free_sector_traces(k_max, tau, n + 2000);
            let exact = log_free_partition_exact(k_max, tau);
            let kept = log_sum_exp(logs[..=n].iter().cloned());
            let deficit = 1.0 - (kept - exact).exp();
            assert!(deficit < 1e-12, "deficit {deficit}");
            assert!(deficit <= free_tail_bound(k_max, tau, n) + 1e-15);
            let all = log_sum_exp(logs.iter().cloned());
            assert!((all - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_cutoff_recovers_product_formula() {
        let tau = 10.0;
        let z = log_free_partition(1, tau, &CutoffProfile::ConstantOne).exp();
        let oracle: f64 = free_ratios(1, tau).iter().map(|q| 1.0 / (1.0 - q)).product();
        assert!((z - oracle).abs() < 1e-10 * oracle);
    }
}
