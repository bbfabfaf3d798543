//! Limit laws of the scaled sample quantile.
//!
//! Under the local expansion `F(t_p + h) - F(t_p) ~ M |h|^rho sgn(h)` the
//! scaled error `n^(1/(2 rho)) (F_n^{-1}(p) - t_p)` converges to `g^{-1}(W)`
//! with `W ~ N(0, sigma^2)` and `sigma^2` the long-run variance of
//! `sqrt(n) F_n(t_p)`. The bootstrap contrast converges to the random sup
//! distance `Z_rho` built from two independent copies of `W`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ks::ks_two_sample;
use crate::dist_models::{normal_cdf, sign, GTransform};
use crate::error::{Error, Result};
use crate::quantile_core::Ecdf;
use crate::rng::{child_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLawSpec {
    pub rho: f64,
    pub m_coef: f64,
    /// Long-run standard deviation of `sqrt(n) (p - F_n(t_p))`.
    pub sigma_lr: f64,
}

impl LimitLawSpec {
    pub fn new(rho: f64, m_coef: f64, sigma_lr: f64) -> Result<Self> {
        GTransform::new(rho, m_coef)?;
        if !(sigma_lr.is_finite() && sigma_lr > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "long-run standard deviation must be positive, got {sigma_lr}"
            )));
        }
        Ok(Self { rho, m_coef, sigma_lr })
    }

    pub fn g(&self) -> GTransform {
        GTransform { rho: self.rho, m_coef: self.m_coef }
    }

    /// `P(g^{-1}(W) <= t) = Phi(|M| |t|^rho sgn(t) / sigma)`.
    pub fn cdf(&self, t: f64) -> f64 {
        normal_cdf(self.m_coef.abs() * t.abs().powf(self.rho) * sign(t) / self.sigma_lr)
    }
}

/// `count` independent draws of `g^{-1}(W)`, `W ~ N(0, sigma^2)`.
pub fn sample_limit_law(spec: &LimitLawSpec, count: usize, seed: u64) -> Vec<f64> {
    let g = spec.g();
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| {
            let w: f64 = rng.sample(StandardNormal);
            g.inverse(spec.sigma_lr * w)
        })
        .collect()
}

/// Conditional sup distance behind `Z_rho`, evaluated with common random
/// numbers: one pool of `W_1` draws serves both as the inner sample of
/// `g^{-1}(W_1 + w_2) - g^{-1}(w_2)` and as the reference sample of
/// `g^{-1}(W_1)`. With a linear `g` (or `w_2 = 0`) the two ECDFs coincide up
/// to floating-point rounding.
pub struct ZRhoSampler {
    g: GTransform,
    pool: Vec<f64>,
    reference: Ecdf,
}

impl ZRhoSampler {
    pub fn new(rho: f64, m_coef: f64, sigma_lr: f64, inner_count: usize, seed: u64) -> Result<Self> {
        let spec = LimitLawSpec::new(rho, m_coef, sigma_lr)?;
        if inner_count == 0 {
            return Err(Error::InvalidParameter("inner_count must be at least 1".into()));
        }
        let mut rng = rng_from_seed(seed);
        let mut pool: Vec<f64> = (0..inner_count).map(|_| sigma_lr * rng.sample::<f64, _>(StandardNormal)).collect();
        pool.sort_unstable_by(f64::total_cmp);
        let g = spec.g();
        let reference = Ecdf::from_vec(pool.iter().map(|&w| g.inverse(w)).collect())?;
        Ok(Self { g, pool, reference })
    }

    /// `sup_t | P(g^{-1}(W_1 + w2) - g^{-1}(w2) <= t) - P(g^{-1}(W_1) <= t) |`
    /// estimated over the pool.
    pub fn conditional_distance(&self, w2: f64) -> f64 {
        let shift = self.g.inverse(w2);
        let shifted: Vec<f64> = self.pool.iter().map(|&w| self.g.inverse(w + w2) - shift).collect();
        // the map is monotone, so `shifted` is already sorted up to rounding
        let conditional = Ecdf::from_vec(shifted).expect("finite pool");
        ks_two_sample(&conditional, &self.reference)
    }
}

/// `count` draws from `Z_rho`: each outer draw of `W_2` yields one
/// conditional sup distance over `inner_count` draws of `W_1`.
pub fn z_rho_sampler(
    rho: f64,
    m_coef: f64,
    sigma_lr: f64,
    count: usize,
    inner_count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let sampler = ZRhoSampler::new(rho, m_coef, sigma_lr, inner_count, child_seed(seed, 0))?;
    let mut rng = rng_from_seed(child_seed(seed, 1));
    let outer: Vec<f64> = (0..count).map(|_| sigma_lr * rng.sample::<f64, _>(StandardNormal)).collect();
    Ok(outer.par_iter().map(|&w2| sampler.conditional_distance(w2)).collect())
}
