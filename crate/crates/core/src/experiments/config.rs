//! Experiment configuration. JSON mirrors the field names; unknown keys are
//! rejected and missing keys take the defaults.

use serde::{Deserialize, Serialize};

use super::lrvar::{DEFAULT_LRVAR_N, MIN_LRVAR_REPLICATES};
use crate::block_bootstrap::{BlockLengthSchedule, BootstrapPlan};
use crate::dist_models::{GaussianModel, LocalExpansion};
use crate::error::{check_probability, Error, Result};
use crate::process_gen::ProcessSpec;

/// Configuration shared by the Monte Carlo experiments.
///
/// The number of bootstrap resamples `B` lives in `plan`, and the marginal
/// model in `process`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub base_seed: u64,
    pub process: ProcessSpec,
    /// Quantile level.
    pub p: f64,
    pub plan: BootstrapPlan,
    /// Path length used by the long-run variance oracle.
    pub lrvar_n: usize,
    pub lrvar_replicates: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![256, 1024, 4096],
            replicates: 1000,
            base_seed: 0,
            process: ProcessSpec::iid(GaussianModel::standard()),
            p: 0.5,
            plan: BootstrapPlan {
                schedule: BlockLengthSchedule::Power { c: 1.0, gamma: 0.5 },
                num_resamples: 1000,
                seed: 0,
            },
            lrvar_n: DEFAULT_LRVAR_N,
            lrvar_replicates: 1000,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::InvalidParameter("n_grid must not be empty".into()));
        }
        if self.n_grid[0] < 2 {
            return Err(Error::InvalidParameter("every n in n_grid must be at least 2".into()));
        }
        if self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(format!(
                "n_grid must be strictly increasing, got {:?}",
                self.n_grid
            )));
        }
        if self.replicates < 2 {
            return Err(Error::InvalidParameter(format!("replicates R must be at least 2, got {}", self.replicates)));
        }
        self.plan.validate()?;
        if self.plan.num_resamples < 2 {
            return Err(Error::InvalidParameter(format!(
                "resamples B must be at least 2, got {}",
                self.plan.num_resamples
            )));
        }
        check_probability(self.p)?;
        if self.lrvar_replicates < MIN_LRVAR_REPLICATES {
            return Err(Error::InvalidParameter(format!(
                "lrvar_replicates must be at least {MIN_LRVAR_REPLICATES}, got {}",
                self.lrvar_replicates
            )));
        }
        if self.lrvar_n < 2 {
            return Err(Error::InvalidParameter("lrvar_n must be at least 2".into()));
        }
        for &n in &self.n_grid {
            self.block_length(n)?;
        }
        self.local_expansion()?;
        Ok(())
    }

    pub fn local_expansion(&self) -> Result<LocalExpansion> {
        self.process.marginal().local_expansion(self.p)
    }

    /// Block length for sample size `n`. A fixed length larger than `n` is an
    /// error here rather than being clipped.
    pub fn block_length(&self, n: usize) -> Result<usize> {
        let l = match self.plan.schedule {
            BlockLengthSchedule::Fixed(l) => l,
            schedule => schedule.block_length(n),
        };
        if l == 0 || l > n {
            return Err(Error::BlockLength { l, n });
        }
        Ok(l)
    }
}

/// Configuration of the `Z_rho` sampler experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZRhoConfig {
    pub rho: f64,
    pub m_coef: f64,
    pub sigma_lr: f64,
    pub count: usize,
    pub inner_count: usize,
    pub seed: u64,
}

impl Default for ZRhoConfig {
    fn default() -> Self {
        Self { rho: 2.0, m_coef: 0.5, sigma_lr: 1.0, count: 2000, inner_count: 5000, seed: 0 }
    }
}

impl ZRhoConfig {
    pub fn validate(&self) -> Result<()> {
        super::limit_law::LimitLawSpec::new(self.rho, self.m_coef, self.sigma_lr)?;
        if self.count < 2 || self.inner_count < 1 {
            return Err(Error::InvalidParameter("count must be at least 2 and inner_count at least 1".into()));
        }
        Ok(())
    }
}

/// Configuration of a single simulated path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub process: ProcessSpec,
    pub n: usize,
    pub seed: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { process: ProcessSpec::iid(GaussianModel::standard()), n: 1000, seed: 0 }
    }
}

impl SimulateConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        Ok(())
    }
}
