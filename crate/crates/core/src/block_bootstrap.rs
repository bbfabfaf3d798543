//! Circular block bootstrap.
//!
//! The sample is extended periodically, `X_{i+n} = X_i`, and `b = floor(n / l)`
//! blocks of `l` consecutive observations are drawn with independent start
//! indices uniform on all `n` positions. The trailing `n - b l` positions are
//! not padded, so a resample has exactly `b l` values.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist_models::LocalExpansion;
use crate::error::{Error, Result};
use crate::process_gen::Sample;
use crate::quantile_core::{order_statistic_rank, BahadurDecomposition, Ecdf};
use crate::rng::{rng_from_seed, McRng};

/// Block length as a function of the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRepr", into = "ScheduleRepr")]
pub enum BlockLengthSchedule {
    Fixed(usize),
    /// `floor(c n^gamma)` clipped to `[1, n]`.
    Power { c: f64, gamma: f64 },
    /// The power rule evaluated at `a_n = 2^floor(log2 n)`, so the block
    /// length is constant on every range `[2^k, 2^(k+1) - 1]`.
    DyadicPower { c: f64, gamma: f64 },
}

impl BlockLengthSchedule {
    pub fn fixed(l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("fixed block length must be at least 1".into()));
        }
        Ok(Self::Fixed(l))
    }

    pub fn power(c: f64, gamma: f64) -> Result<Self> {
        check_power(c, gamma)?;
        Ok(Self::Power { c, gamma })
    }

    pub fn dyadic_power(c: f64, gamma: f64) -> Result<Self> {
        check_power(c, gamma)?;
        Ok(Self::DyadicPower { c, gamma })
    }

    pub fn block_length(&self, n: usize) -> usize {
        let n = n.max(1);
        match *self {
            Self::Fixed(l) => l.clamp(1, n),
            Self::Power { c, gamma } => power_length(c, gamma, n),
            Self::DyadicPower { c, gamma } => power_length(c, gamma, dyadic_floor(n)),
        }
    }

    /// Constants `(C1, C2, eps1)` with `C1 n^eps1 <= l_n <= C2 n^(1 - eps1)`
    /// for every `n >= 1`; `None` for a fixed block length.
    ///
    /// With `eps1 = min(gamma, 1 - gamma)`: `floor(x) >= x / 2` for `x >= 1`
    /// gives `C1 = min(c, 1) / 2` for the power rule and `min(c 2^-gamma, 1) / 2`
    /// for the dyadic rule (since `a_n > n / 2`); `C2 = max(c, 1)` covers the
    /// clip at 1.
    pub fn implied_bounds(&self) -> Option<(f64, f64, f64)> {
        match *self {
            Self::Fixed(_) => None,
            Self::Power { c, gamma } => Some((c.min(1.0) / 2.0, c.max(1.0), gamma.min(1.0 - gamma))),
            Self::DyadicPower { c, gamma } => Some((
                (c * 2f64.powf(-gamma)).min(1.0) / 2.0,
                c.max(1.0),
                gamma.min(1.0 - gamma),
            )),
        }
    }
}

fn check_power(c: f64, gamma: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!("block-length constant c must be positive, got {c}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("block-length exponent gamma must lie in (0, 1), got {gamma}")));
    }
    Ok(())
}

fn power_length(c: f64, gamma: f64, n: usize) -> usize {
    // the offset absorbs pow() rounding just below exact integers, e.g. 100^0.5
    let raw = (c * (n as f64).powf(gamma) + 1e-9).floor();
    (raw.max(1.0) as usize).min(n)
}

/// `a_n = 2^k` with `2^k <= n < 2^(k+1)`.
pub fn dyadic_floor(n: usize) -> usize {
    1usize << (usize::BITS - 1 - n.max(1).leading_zeros())
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ScheduleRepr {
    Fixed { l: usize },
    Power { c: f64, gamma: f64 },
    DyadicPower { c: f64, gamma: f64 },
}

impl TryFrom<ScheduleRepr> for BlockLengthSchedule {
    type Error = Error;

    fn try_from(r: ScheduleRepr) -> Result<Self> {
        match r {
            ScheduleRepr::Fixed { l } => Self::fixed(l),
            ScheduleRepr::Power { c, gamma } => Self::power(c, gamma),
            ScheduleRepr::DyadicPower { c, gamma } => Self::dyadic_power(c, gamma),
        }
    }
}

impl From<BlockLengthSchedule> for ScheduleRepr {
    fn from(s: BlockLengthSchedule) -> Self {
        match s {
            BlockLengthSchedule::Fixed(l) => ScheduleRepr::Fixed { l },
            BlockLengthSchedule::Power { c, gamma } => ScheduleRepr::Power { c, gamma },
            BlockLengthSchedule::DyadicPower { c, gamma } => ScheduleRepr::DyadicPower { c, gamma },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapPlan {
    pub schedule: BlockLengthSchedule,
    #[serde(rename = "B")]
    pub num_resamples: usize,
    pub seed: u64,
}

impl BootstrapPlan {
    pub fn new(schedule: BlockLengthSchedule, num_resamples: usize, seed: u64) -> Result<Self> {
        let plan = Self { schedule, num_resamples, seed };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_resamples == 0 {
            return Err(Error::InvalidParameter("number of resamples B must be at least 1".into()));
        }
        Ok(())
    }
}

/// One circular block bootstrap resample `X*_1, ..., X*_{bl}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSample {
    values: Vec<f64>,
    /// Zero-based start index of each block in the source sample.
    block_starts: Vec<usize>,
    block_length: usize,
}

impl BootstrapSample {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn block_starts(&self) -> &[usize] {
        &self.block_starts
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn num_blocks(&self) -> usize {
        self.block_starts.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_block_length(l: usize, n: usize) -> Result<()> {
    if l == 0 || l > n {
        return Err(Error::BlockLength { l, n });
    }
    Ok(())
}

/// Draws `b` block starts uniformly from `0..n`.
#[inline]
fn draw_starts(rng: &mut McRng, n: usize, b: usize, out: &mut Vec<usize>) {
    out.clear();
    out.extend((0..b).map(|_| rng.random_range(0..n)));
}

/// Circular block bootstrap resample with `b = floor(n / l)` blocks.
pub fn resample(sample: &Sample, l: usize, seed: u64) -> Result<BootstrapSample> {
    let n = sample.len();
    check_block_length(l, n)?;
    let mut starts = Vec::with_capacity(n / l);
    draw_starts(&mut rng_from_seed(seed), n, n / l, &mut starts);
    resample_with_starts(sample, l, &starts)
}

/// Builds a resample from explicit zero-based block starts. Any positive
/// number of blocks is accepted.
pub fn resample_with_starts(sample: &Sample, l: usize, starts: &[usize]) -> Result<BootstrapSample> {
    let n = sample.len();
    check_block_length(l, n)?;
    if starts.is_empty() {
        return Err(Error::InvalidParameter("at least one block start is required".into()));
    }
    if let Some(&j) = starts.iter().find(|&&j| j >= n) {
        return Err(Error::InvalidParameter(format!("block start {j} outside 0..{n}")));
    }
    let x = sample.values();
    let mut values = Vec::with_capacity(starts.len() * l);
    for &j in starts {
        values.extend((j..j + l).map(|i| x[i % n]));
    }
    Ok(BootstrapSample { values, block_starts: starts.to_vec(), block_length: l })
}

/// `F*_n(t) = (1 / bl) sum 1{X*_i <= t}`.
pub fn bootstrap_ecdf(bs: &BootstrapSample) -> Ecdf {
    Ecdf::new(&bs.values).expect("resample values come from a validated sample")
}

pub fn bootstrap_quantile(bs: &BootstrapSample, q: f64) -> Result<f64> {
    bootstrap_ecdf(bs).quantile(q)
}

/// Exact conditional expectation `E* F*_n(t)`, averaging the block ECDF over
/// all `n` equally likely circular start positions.
pub fn expected_bootstrap_ecdf(sample: &Sample, l: usize, t: f64) -> Result<f64> {
    let n = sample.len();
    check_block_length(l, n)?;
    let x = sample.values();
    let hit = |i: usize| usize::from(x[i % n] <= t);
    let mut window: usize = (0..l).map(hit).sum();
    let mut total = window;
    for j in 1..n {
        window = window + hit(j + l - 1) - hit(j - 1);
        total += window;
    }
    Ok(total as f64 / (n * l) as f64)
}

/// Bahadur decomposition of the bootstrap quantile, centered at the true
/// `t_p` and scaled by `(bl)^(1/(2 rho))`.
pub fn bootstrap_bahadur_decompose(bs: &BootstrapSample, local: &LocalExpansion) -> Result<BahadurDecomposition> {
    BahadurDecomposition::from_ecdf(&bootstrap_ecdf(bs), local, bs.len())
}

/// Repeated bootstrap quantiles of one sample without materializing the
/// resamples.
///
/// Observations are replaced by their ranks; each resample accumulates a
/// histogram of ranks over its `b` circular windows and the
/// `ceil(bl q)`-th order statistic is read off the cumulative counts. The
/// result equals `bootstrap_quantile(resample(sample, l, seed), q)`.
pub struct QuantileResampler {
    sorted: Vec<f64>,
    /// Rank of `X_{i mod n}` for `i < 2n`.
    ranks: Vec<u32>,
    counts: Vec<u32>,
    starts: Vec<usize>,
}

impl QuantileResampler {
    pub fn new(sample: &Sample) -> Self {
        let x = sample.values();
        let n = x.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
        let mut rank = vec![0u32; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as u32;
        }
        let sorted = order.iter().map(|&i| x[i]).collect();
        let ranks = rank.iter().chain(rank.iter()).copied().collect();
        Self { sorted, ranks, counts: vec![0; n], starts: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// The bootstrap `q`-quantile of the resample drawn with `seed`.
    pub fn quantile(&mut self, l: usize, q: f64, seed: u64) -> Result<f64> {
        let n = self.len();
        check_block_length(l, n)?;
        let b = n / l;
        let target = order_statistic_rank(b * l, q)? as u32;
        let mut starts = std::mem::take(&mut self.starts);
        draw_starts(&mut rng_from_seed(seed), n, b, &mut starts);
        for &j in &starts {
            for &r in &self.ranks[j..j + l] {
                self.counts[r as usize] += 1;
            }
        }
        self.starts = starts;
        let mut cumulative = 0u32;
        let mut found = n - 1;
        for (r, &c) in self.counts.iter().enumerate() {
            cumulative += c;
            if cumulative >= target {
                found = r;
                break;
            }
        }
        self.counts.fill(0);
        Ok(self.sorted[found])
    }
}
