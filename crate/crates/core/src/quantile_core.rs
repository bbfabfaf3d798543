//! Empirical distribution function, empirical quantile, and the nonlinear
//! Bahadur decomposition
//!
//! ```text
//! F_n^{-1}(p) - t_p = g^{-1}(p - F_n(t_p)) + R_n,   g(x) = M |x|^rho sgn(x).
//! ```

use serde::{Deserialize, Serialize};

use crate::dist_models::LocalExpansion;
use crate::error::{check_probability, Error, Result};
use crate::process_gen::Sample;

/// Right-continuous step function `F_n(t) = #{X_i <= t} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        Self::from_vec(values.to_vec())
    }

    pub fn from_vec(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn from_sample(sample: &Sample) -> Self {
        let mut sorted = sample.values().to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Self { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    /// Number of observations `<= t`.
    #[inline]
    pub fn count_le(&self, t: f64) -> usize {
        self.sorted.partition_point(|&x| x <= t)
    }

    /// Number of observations `< t`.
    #[inline]
    pub fn count_lt(&self, t: f64) -> usize {
        self.sorted.partition_point(|&x| x < t)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.count_le(t) as f64 / self.len() as f64
    }

    /// Left limit `F_n(t-)`.
    #[inline]
    pub fn eval_left(&self, t: f64) -> f64 {
        self.count_lt(t) as f64 / self.len() as f64
    }

    /// `inf { t : F_n(t) >= q }`, the `ceil(nq)`-th order statistic.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        let k = order_statistic_rank(self.len(), q)?;
        Ok(self.sorted[k - 1])
    }
}

/// The 1-based rank `k = ceil(nq)` of the order statistic that realizes the
/// empirical `q`-quantile.
///
/// `k` is the smallest integer with `k / n >= q` evaluated in floating point,
/// so it agrees exactly with the infimum over the computed step function even
/// when `n * q` is not representable.
pub fn order_statistic_rank(n: usize, q: f64) -> Result<usize> {
    check_probability(q)?;
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let nf = n as f64;
    let mut k = ((nf * q).ceil() as usize).clamp(1, n);
    while k > 1 && ((k - 1) as f64 / nf) >= q {
        k -= 1;
    }
    while k < n && (k as f64 / nf) < q {
        k += 1;
    }
    Ok(k)
}

/// The `q`-quantile of the empirical distribution of `values`.
pub fn empirical_quantile(ecdf: &Ecdf, q: f64) -> Result<f64> {
    ecdf.quantile(q)
}

/// Split of the quantile error into the linearized term and the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BahadurDecomposition {
    pub empirical_quantile: f64,
    /// `g^{-1}(p - F_n(t_p))`.
    pub linearized_term: f64,
    /// `R_n = F_n^{-1}(p) - t_p - g^{-1}(p - F_n(t_p))`.
    pub remainder: f64,
    /// `size^(1/(2 rho)) R_n`.
    pub scaled_remainder: f64,
    /// Number of observations behind the empirical distribution.
    pub size: usize,
}

impl BahadurDecomposition {
    pub const CSV_HEADER: &'static str = "n,seed,eq,lin,rem,scaled_rem";

    /// Computes the decomposition from an empirical distribution with `size`
    /// used for the scaling.
    pub fn from_ecdf(ecdf: &Ecdf, local: &LocalExpansion, size: usize) -> Result<Self> {
        let empirical_quantile = ecdf.quantile(local.p)?;
        let linearized_term = local.g().inverse(local.p - ecdf.eval(local.t_p));
        let remainder = empirical_quantile - local.t_p - linearized_term;
        Ok(Self {
            empirical_quantile,
            linearized_term,
            remainder,
            scaled_remainder: local.rate(size) * remainder,
            size,
        })
    }

    /// The same decomposition scaled by `count^(1/(2 rho))` instead.
    pub fn rescaled(&self, local: &LocalExpansion, count: usize) -> Self {
        Self { scaled_remainder: local.rate(count) * self.remainder, size: count, ..*self }
    }

    /// `size^(1/(2 rho)) (F_n^{-1}(p) - t_p)`.
    pub fn scaled_error(&self, local: &LocalExpansion) -> f64 {
        local.rate(self.size) * (self.empirical_quantile - local.t_p)
    }

    pub fn to_csv_row(&self, seed: u64) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.size, seed, self.empirical_quantile, self.linearized_term, self.remainder, self.scaled_remainder
        )
    }
}

/// Nonlinear Bahadur decomposition of the sample `p`-quantile.
pub fn bahadur_decompose(sample: &Sample, local: &LocalExpansion) -> Result<BahadurDecomposition> {
    BahadurDecomposition::from_ecdf(&Ecdf::from_sample(sample), local, sample.len())
}
