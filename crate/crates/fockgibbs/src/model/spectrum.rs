use std::f64::consts::PI;

/// Eigenvalue of `½(−d²/dx² + 1)` on the unit torus at Fourier mode `k`.
pub fn eigenvalue(k: i64) -> f64 {
    let w = 2.0 * PI * k as f64;
    0.5 * (w * w + 1.0)
}

/// Number of modes `J = 2·k_max + 1` in the window `|k| ≤ k_max`.
pub fn mode_count(k_max: usize) -> usize {
    2 * k_max + 1
}

/// Position of mode `k` in the window ordering `−k_max, …, k_max`.
pub fn mode_index(k: i64, k_max: usize) -> usize {
    (k + k_max as i64) as usize
}

pub fn mode_of_index(j: usize, k_max: usize) -> i64 {
    j as i64 - k_max as i64
}

/// `Σ 1/λ_k` over `|k| ≤ k_max`, or over all of ℤ when `k_max` is `None`.
pub fn trace_h_inverse(k_max: Option<usize>) -> f64 {
    match k_max {
        // Σ_k 2/((2πk)²+1) = coth(1/2).
        None => 1.0 / 0.5f64.tanh(),
        Some(m) => {
            let tail: f64 = (1..=m as i64).rev().map(|k| 2.0 / eigenvalue(k)).sum();
            1.0 / eigenvalue(0) + tail
        }
    }
}
