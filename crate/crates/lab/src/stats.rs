/// Least-squares line through `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn affine_fit(x: &[f64], y: &[f64]) -> AffineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    AffineFit { slope, intercept: my - slope * mx, r_squared }
}

/// Decreasing-trend verdict: every step must go down, except at most one step whose
/// rise stays within the combined standard error of its two endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trend {
    pub rises: usize,
    pub excused: usize,
}

impl Trend {
    pub fn holds(&self) -> bool {
        self.rises == self.excused && self.excused <= 1
    }
}

pub fn decreasing_trend(values: &[f64], stderr: &[f64]) -> Trend {
    let mut trend = Trend { rises: 0, excused: 0 };
    for i in 1..values.len() {
        let rise = values[i] - values[i - 1];
        if rise >= 0.0 {
            trend.rises += 1;
            if rise <= stderr[i].hypot(stderr[i - 1]) {
                trend.excused += 1;
            }
        }
    }
    trend
}

/// Whether `a` exceeds `b` by more than `k` combined standard errors.
pub fn exceeds(a: (f64, f64), b: (f64, f64), k: f64) -> bool {
    a.0 - b.0 > k * a.1.hypot(b.1)
}
