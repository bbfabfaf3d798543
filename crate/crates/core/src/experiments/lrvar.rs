//! Brute-force Monte Carlo oracle for the long-run variance
//! `sigma^2 = lim Var[sqrt(n) F_n(t_p)]`.

use rayon::prelude::*;

use super::summary::Estimate;
use crate::dist_models::LocalExpansion;
use crate::error::{Error, Result};
use crate::process_gen::{generate, ProcessSpec};
use crate::rng::child_seed;

pub const DEFAULT_LRVAR_N: usize = 1 << 14;
pub const MIN_LRVAR_REPLICATES: usize = 500;

/// `Var[sqrt(n) (F_n(t_p) - p)]` over `replicates` independent paths of
/// length `n`, with the standard error of the sample variance.
///
/// Fails with [`Error::DegenerateLongRunVariance`] when the estimate is
/// within 3 standard errors of zero.
pub fn long_run_variance_oracle(
    process: &ProcessSpec,
    local: &LocalExpansion,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<Estimate> {
    if replicates < MIN_LRVAR_REPLICATES {
        return Err(Error::InvalidParameter(format!(
            "long-run variance oracle needs at least {MIN_LRVAR_REPLICATES} replicates, got {replicates}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("long-run variance oracle needs n >= 2, got {n}")));
    }
    let hits = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let sample = generate(process, n, child_seed(seed, r as u64))?;
            Ok(sample.values().iter().filter(|&&x| x <= local.t_p).count() as i128)
        })
        .collect::<Result<Vec<i128>>>()?;
    // Var[sqrt(n) (h / n - p)] = Var[h] / n, centered in exact integer
    // arithmetic so that identical counts give exactly zero
    let r = replicates as i128;
    let total: i128 = hits.iter().sum();
    let scale = (r * r) as f64 * n as f64;
    let sq: Vec<f64> = hits.iter().map(|&h| ((r * h - total).pow(2)) as f64 / scale).collect();
    let rf = replicates as f64;
    let estimate = sq.iter().sum::<f64>() / (rf - 1.0);
    let spread = sq.iter().map(|s| (s - estimate).powi(2)).sum::<f64>() / (rf - 1.0);
    let stderr = (spread / rf).sqrt();
    if estimate <= 3.0 * stderr {
        return Err(Error::DegenerateLongRunVariance { estimate, stderr });
    }
    Ok(Estimate { value: estimate, stderr })
}
