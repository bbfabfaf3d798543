//! Summary statistics with Monte Carlo standard errors.
//!
//! Quantile standard errors use order-statistic bands, never density
//! estimates.

use crate::quantile_core::order_statistic_rank;

/// A value with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample mean with standard error `s / sqrt(n)`.
pub fn mean_estimate(x: &[f64]) -> Estimate {
    let n = x.len() as f64;
    let m = mean(x);
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Estimate { value: m, stderr: (var / n).sqrt() }
}

/// Sample standard deviation with the delta-method standard error
/// `sqrt((m4 - s^4) / (4 s^2 n))`, which does not assume normality.
pub fn sd_estimate(x: &[f64]) -> Estimate {
    let n = x.len() as f64;
    let m = mean(x);
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    let sd = var.sqrt();
    let stderr = if sd > 0.0 { ((m4 - var * var).max(0.0) / (4.0 * var * n)).sqrt() } else { 0.0 };
    Estimate { value: sd, stderr }
}

/// Sample skewness with the normal-theory standard error `sqrt(6 / n)`.
pub fn skewness_estimate(x: &[f64]) -> Estimate {
    let n = x.len() as f64;
    let m = mean(x);
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    Estimate { value: m3 / m2.powf(1.5), stderr: (6.0 / n).sqrt() }
}

/// Empirical `q`-quantile (`ceil(nq)`-th order statistic) of sorted data,
/// with half the width of the order-statistic band `nq +- sqrt(nq(1-q))`
/// as its standard error.
pub fn quantile_estimate(sorted: &[f64], q: f64) -> Estimate {
    let n = sorted.len();
    let k = order_statistic_rank(n, q).expect("q in (0, 1) and nonempty data");
    let half = (n as f64 * q * (1.0 - q)).sqrt();
    let lo = ((n as f64 * q - half).floor() as isize).clamp(1, n as isize) as usize;
    let hi = ((n as f64 * q + half).ceil() as isize).clamp(1, n as isize) as usize;
    Estimate { value: sorted[k - 1], stderr: 0.5 * (sorted[hi - 1] - sorted[lo - 1]) }
}

pub fn iqr_estimate(sorted: &[f64]) -> Estimate {
    let q1 = quantile_estimate(sorted, 0.25);
    let q3 = quantile_estimate(sorted, 0.75);
    Estimate { value: q3.value - q1.value, stderr: q1.stderr.hypot(q3.stderr) }
}

pub fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// `true` when the sequence keeps strictly decreasing while it is above
/// `floor` and never climbs back above `floor` once it has reached it.
pub fn decreasing_to_floor(values: &[f64], floor: f64) -> bool {
    values.windows(2).all(|w| if w[0] > floor { w[1] < w[0] } else { w[1] <= floor })
}
