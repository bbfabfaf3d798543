//! The Monte Carlo experiments. Every random quantity is drawn from a stream
//! keyed by `(domain, n, replicate, ...)` below the base seed, so results do
//! not depend on the thread count or on the other entries of `n_grid`.

use std::time::Instant;

use rayon::prelude::*;

use super::config::{McConfig, ZRhoConfig};
use super::ks::{ks_distance, ks_null_sd, ks_null_sd_one_sample, ks_two_sample, ContinuousCdf};
use super::limit_law::{sample_limit_law, z_rho_sampler, LimitLawSpec, ZRhoSampler};
use super::lrvar::long_run_variance_oracle;
use super::report::ExperimentReport;
use super::summary::{
    decreasing_to_floor, iqr_estimate, mean_estimate, quantile_estimate, sd_estimate, sorted, Estimate,
};
use crate::block_bootstrap::{bootstrap_bahadur_decompose, resample, QuantileResampler};
use crate::dist_models::{normal_cdf, LocalExpansion};
use crate::error::{Error, Result};
use crate::process_gen::{generate, Sample};
use crate::quantile_core::{BahadurDecomposition, Ecdf};
use crate::rng::child_seed;

/// Seed domains below the base seed.
const DATA: u64 = 1;
const LIMIT: u64 = 2;
const ORACLE: u64 = 3;
const STREAM: u64 = 4;
const PROXY: u64 = 5;

/// Seed of the data stream for sample size `n`.
pub fn data_seed(base: u64, n: usize) -> u64 {
    child_seed(child_seed(base, DATA), n as u64)
}

fn proxy_seed(base: u64, n: usize) -> u64 {
    child_seed(child_seed(base, PROXY), n as u64)
}

fn replicate_sample(cfg: &McConfig, stream: u64, n: usize, r: usize) -> Result<Sample> {
    generate(&cfg.process, n, child_seed(stream, r as u64))
}

/// Bahadur decompositions of the sample quantile over the `R` data
/// replicates at sample size `n`. The CLT statistic of replicate `r` is
/// `out[r].scaled_error(local)`.
pub fn clt_statistics(cfg: &McConfig, n: usize) -> Result<Vec<BahadurDecomposition>> {
    let local = cfg.local_expansion()?;
    let stream = data_seed(cfg.base_seed, n);
    (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let sample = replicate_sample(cfg, stream, n, r)?;
            BahadurDecomposition::from_ecdf(&Ecdf::from_sample(&sample), &local, n)
        })
        .collect()
}

/// `sigma^2` from the long-run variance oracle with the config's settings.
pub fn long_run_variance(cfg: &McConfig) -> Result<Estimate> {
    let local = cfg.local_expansion()?;
    long_run_variance_oracle(
        &cfg.process,
        &local,
        cfg.lrvar_n,
        cfg.lrvar_replicates,
        child_seed(cfg.base_seed, ORACLE),
    )
}

/// Distributional limit of the scaled sample quantile.
///
/// Rows per n: `ks_limit` (two-sample KS to `10 R` draws of `g^{-1}(W)`),
/// `ks_limit_exact` (KS to the closed-form limit cdf) and
/// `ks_moment_normal` (KS to the normal with the sample's mean and
/// standard deviation). One `sigma2_lr` row at `n = lrvar_n`.
pub fn run_clt_experiment(cfg: &McConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let local = cfg.local_expansion()?;
    let sigma2 = long_run_variance(cfg)?;
    let limit = LimitLawSpec::new(local.rho, local.m_coef, sigma2.value.sqrt())?;
    let mut report = ExperimentReport::new("clt", cfg, cfg.base_seed)?;
    report.push(cfg.lrvar_n, "sigma2_lr", sigma2.value, sigma2.stderr, child_seed(cfg.base_seed, ORACLE));
    let limit_count = 10 * cfg.replicates;
    for &n in &cfg.n_grid {
        let stats: Vec<f64> = clt_statistics(cfg, n)?.iter().map(|d| d.scaled_error(&local)).collect();
        let ecdf = Ecdf::from_vec(stats.clone())?;
        let limit_seed = child_seed(child_seed(cfg.base_seed, LIMIT), n as u64);
        let limit_ecdf = Ecdf::from_vec(sample_limit_law(&limit, limit_count, limit_seed))?;
        let seed = data_seed(cfg.base_seed, n);
        report.push(n, "ks_limit", ks_two_sample(&ecdf, &limit_ecdf), ks_null_sd(cfg.replicates, limit_count), seed);
        let exact = ks_distance(&ecdf, &ContinuousCdf(|t| limit.cdf(t)));
        report.push(n, "ks_limit_exact", exact, ks_null_sd_one_sample(cfg.replicates), seed);
        let m = mean_estimate(&stats).value;
        let s = sd_estimate(&stats).value;
        let normal = ks_distance(&ecdf, &ContinuousCdf(|t| normal_cdf((t - m) / s)));
        report.push(n, "ks_moment_normal", normal, ks_null_sd_one_sample(cfg.replicates), seed);
    }
    report.set_wall_time(start.elapsed());
    Ok(report)
}

/// Remainder of the Bahadur decomposition, plain and bootstrap.
///
/// Rows per n: median and 90th percentile of `|n^(1/(2 rho)) R_n|`
/// (`median_abs_rem`, `p90_abs_rem`) and of `|(bl)^(1/(2 rho)) R*_n|` from one
/// circular block bootstrap resample per replicate (`boot_median_abs_rem`,
/// `boot_p90_abs_rem`), and the block length used.
pub fn run_bahadur_experiment(cfg: &McConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let local = cfg.local_expansion()?;
    let mut report = ExperimentReport::new("bahadur", cfg, cfg.base_seed)?;
    for &n in &cfg.n_grid {
        let l = cfg.block_length(n)?;
        let stream = data_seed(cfg.base_seed, n);
        let resample_stream = child_seed(cfg.plan.seed, n as u64);
        let pairs = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| {
                let sample = replicate_sample(cfg, stream, n, r)?;
                let plain = BahadurDecomposition::from_ecdf(&Ecdf::from_sample(&sample), &local, n)?;
                let bs = resample(&sample, l, child_seed(resample_stream, r as u64))?;
                let boot = bootstrap_bahadur_decompose(&bs, &local)?;
                Ok((plain.scaled_remainder.abs(), boot.scaled_remainder.abs()))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        let plain = sorted(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
        let boot = sorted(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
        for (name, q, data) in [
            ("median_abs_rem", 0.5, &plain),
            ("p90_abs_rem", 0.9, &plain),
            ("boot_median_abs_rem", 0.5, &boot),
            ("boot_p90_abs_rem", 0.9, &boot),
        ] {
            let e = quantile_estimate(data, q);
            report.push(n, name, e.value, e.stderr, stream);
        }
        report.push(n, "block_length", l as f64, 0.0, resample_stream);
    }
    report.set_wall_time(start.elapsed());
    Ok(report)
}

/// KS distance between the bootstrap law of
/// `(bl)^(1/(2 rho)) (F*_n^{-1}(p) - F_n^{-1}(p))` over `B` resamples of
/// `sample` and `proxy`, the Monte Carlo law of `n^(1/(2 rho)) (F_n^{-1}(p) - t_p)`.
pub fn bootstrap_contrast(
    sample: &Sample,
    local: &LocalExpansion,
    l: usize,
    resamples: usize,
    seed: u64,
    proxy: &Ecdf,
) -> Result<f64> {
    let n = sample.len();
    let center = Ecdf::from_sample(sample).quantile(local.p)?;
    let rate = local.rate((n / l) * l);
    let mut resampler = QuantileResampler::new(sample);
    let stats = (0..resamples)
        .map(|k| Ok(rate * (resampler.quantile(l, local.p, child_seed(seed, k as u64))? - center)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ks_two_sample(&Ecdf::from_vec(stats)?, proxy))
}

/// The Monte Carlo proxy for the sampling law at size `n`, built from `R`
/// replicates independent of the data replicates.
pub fn sampling_law_proxy(cfg: &McConfig, n: usize) -> Result<Ecdf> {
    let local = cfg.local_expansion()?;
    let stream = proxy_seed(cfg.base_seed, n);
    let stats = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let sample = replicate_sample(cfg, stream, n, r)?;
            Ok(local.rate(n) * (Ecdf::from_sample(&sample).quantile(local.p)? - local.t_p))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ecdf::from_vec(stats)
}

/// `D_{n,r}` for every data replicate `r`.
pub fn contrast_distances(cfg: &McConfig, n: usize) -> Result<Vec<f64>> {
    let local = cfg.local_expansion()?;
    let l = cfg.block_length(n)?;
    let proxy = sampling_law_proxy(cfg, n)?;
    let stream = data_seed(cfg.base_seed, n);
    let resample_stream = child_seed(cfg.plan.seed, n as u64);
    (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let sample = replicate_sample(cfg, stream, n, r)?;
            let seed = child_seed(resample_stream, r as u64);
            bootstrap_contrast(&sample, &local, l, cfg.plan.num_resamples, seed, &proxy)
        })
        .collect()
}

fn contrast_report(cfg: &McConfig, experiment: &str) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = ExperimentReport::new(experiment, cfg, cfg.base_seed)?;
    for &n in &cfg.n_grid {
        let d = contrast_distances(cfg, n)?;
        let ds = sorted(&d);
        let seed = data_seed(cfg.base_seed, n);
        let mean = mean_estimate(&d);
        let sd = sd_estimate(&d);
        report.push(n, "mean_d", mean.value, mean.stderr, seed);
        report.push(n, "sd_d", sd.value, sd.stderr, seed);
        for (name, e) in [
            ("median_d", quantile_estimate(&ds, 0.5)),
            ("q90_d", quantile_estimate(&ds, 0.9)),
            ("iqr_d", iqr_estimate(&ds)),
        ] {
            report.push(n, name, e.value, e.stderr, seed);
        }
        report.push(n, "block_length", cfg.block_length(n)? as f64, 0.0, child_seed(cfg.plan.seed, n as u64));
    }
    report.set_wall_time(start.elapsed());
    Ok(report)
}

/// Bootstrap contrast `D_{n,r}` summarized over data replicates: `mean_d`,
/// `sd_d`, `median_d`, `q90_d`, `iqr_d` and `block_length` per n.
pub fn run_bootstrap_consistency_experiment(cfg: &McConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    contrast_report(cfg, "boot_consistency")
}

/// The same contrast for a marginal whose local exponent differs from 1.
pub fn run_inconsistency_experiment(cfg: &McConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    if cfg.local_expansion()?.rho == 1.0 {
        return Err(Error::InvalidParameter(
            "the inconsistency experiment needs a marginal with rho != 1".into(),
        ));
    }
    contrast_report(cfg, "inconsistency")
}

/// `D_n` along one fixed data path: the sample of size `max(n_grid)` is drawn
/// once and each `n` uses its prefix. Rows per n: `d` with the KS null
/// standard deviation for `(B, R)` as its standard error, and `block_length`.
pub fn run_strong_consistency_experiment(cfg: &McConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let local = cfg.local_expansion()?;
    let n_max = *cfg.n_grid.last().expect("validated nonempty");
    let stream = child_seed(cfg.base_seed, STREAM);
    let path = generate(&cfg.process, n_max, stream)?;
    let mut report = ExperimentReport::new("strong_consistency", cfg, cfg.base_seed)?;
    let rows = cfg
        .n_grid
        .par_iter()
        .map(|&n| {
            let l = cfg.block_length(n)?;
            let proxy = sampling_law_proxy(cfg, n)?;
            let seed = child_seed(cfg.plan.seed, n as u64);
            let d = bootstrap_contrast(&path.prefix(n)?, &local, l, cfg.plan.num_resamples, seed, &proxy)?;
            Ok((n, l, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let se = ks_null_sd(cfg.plan.num_resamples, cfg.replicates);
    for (n, l, d) in rows {
        report.push(n, "d", d, se, stream);
        report.push(n, "block_length", l as f64, 0.0, child_seed(cfg.plan.seed, n as u64));
    }
    report.set_wall_time(start.elapsed());
    Ok(report)
}

/// Draws from `Z_rho`. Rows (with `n = inner_count`): `mean_z`, `sd_z`,
/// `median_z`, and `forced_w2_zero`, the conditional distance at `W_2 = 0`.
pub fn run_zrho_experiment(cfg: &ZRhoConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let z = z_rho_sampler(cfg.rho, cfg.m_coef, cfg.sigma_lr, cfg.count, cfg.inner_count, cfg.seed)?;
    let mut report = ExperimentReport::new("zrho", cfg, cfg.seed)?;
    let n = cfg.inner_count;
    let mean = mean_estimate(&z);
    let sd = sd_estimate(&z);
    report.push(n, "mean_z", mean.value, mean.stderr, cfg.seed);
    report.push(n, "sd_z", sd.value, sd.stderr, cfg.seed);
    let median = quantile_estimate(&sorted(&z), 0.5);
    report.push(n, "median_z", median.value, median.stderr, cfg.seed);
    // the same pool as the sampler, conditioned on W_2 = 0
    let sampler = ZRhoSampler::new(cfg.rho, cfg.m_coef, cfg.sigma_lr, cfg.inner_count, child_seed(cfg.seed, 0))?;
    report.push(n, "forced_w2_zero", sampler.conditional_distance(0.0), 0.0, cfg.seed);
    report.set_wall_time(start.elapsed());
    Ok(report)
}

/// Long-run variance oracle at every n in `n_grid` with `R = replicates`.
pub fn run_lrvar_experiment(cfg: &McConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let local = cfg.local_expansion()?;
    let mut report = ExperimentReport::new("lrvar", cfg, cfg.base_seed)?;
    for &n in &cfg.n_grid {
        let seed = child_seed(child_seed(cfg.base_seed, ORACLE), n as u64);
        let e = long_run_variance_oracle(&cfg.process, &local, n, cfg.replicates, seed)?;
        report.push(n, "sigma2_lr", e.value, e.stderr, seed);
    }
    report.set_wall_time(start.elapsed());
    Ok(report)
}

/// `true` when the values of `metric` decrease along the grid until they
/// reach `floor` and stay at or below it afterwards.
pub fn metric_decreasing_to_floor(report: &ExperimentReport, metric: &str, floor: f64) -> bool {
    decreasing_to_floor(&report.values(metric), floor)
}
