//! Monte Carlo harness: limit laws, KS distances, remainder rates and
//! bootstrap (in)consistency diagnostics.

pub mod config;
pub mod ks;
pub mod limit_law;
pub mod lrvar;
pub mod report;
pub mod runs;
pub mod summary;

pub use config::{McConfig, SimulateConfig, ZRhoConfig};
pub use ks::{ks_distance, ks_two_sample, ContinuousCdf, DistributionFunction};
pub use limit_law::{sample_limit_law, z_rho_sampler, LimitLawSpec, ZRhoSampler};
pub use lrvar::long_run_variance_oracle;
pub use report::{ExperimentReport, ReportRow};
pub use runs::{
    run_bahadur_experiment, run_bootstrap_consistency_experiment, run_clt_experiment, run_inconsistency_experiment,
    run_lrvar_experiment, run_strong_consistency_experiment, run_zrho_experiment,
};
pub use summary::Estimate;
