//! Sample quantiles of dependent data: empirical quantiles and their
//! nonlinear Bahadur decomposition, the circular block bootstrap, and a
//! seeded Monte Carlo harness for the limit laws.

pub mod block_bootstrap;
pub mod dist_models;
pub mod error;
pub mod experiments;
pub mod process_gen;
pub mod quantile_core;
pub mod rng;

pub use block_bootstrap::{
    bootstrap_bahadur_decompose, bootstrap_ecdf, bootstrap_quantile, dyadic_floor, expected_bootstrap_ecdf, resample,
    resample_with_starts, BlockLengthSchedule, BootstrapPlan, BootstrapSample, QuantileResampler,
};
pub use dist_models::{DistributionModel, GTransform, GaussianModel, LocalExpansion, PowerLocalModel};
pub use error::{Error, Result};
pub use process_gen::{generate, ProcessKind, ProcessSpec, Sample};
pub use quantile_core::{bahadur_decompose, empirical_quantile, BahadurDecomposition, Ecdf};
