//! Experiment reports: one row per (n, metric), emitted as CSV or JSON.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub n: usize,
    pub metric: String,
    pub value: f64,
    pub stderr: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    /// SHA-256 of the canonical JSON of the config.
    pub config_hash: String,
    pub base_seed: u64,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub rows: Vec<ReportRow>,
    pub metadata: ReportMetadata,
}

impl ExperimentReport {
    pub const CSV_HEADER: &'static str = "experiment,n,metric,value,stderr,seed";

    pub fn new<C: Serialize>(experiment: &str, config: &C, base_seed: u64) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        let config_hash = hex(&Sha256::digest(serde_json::to_vec(&config)?));
        Ok(Self {
            experiment: experiment.to_string(),
            config,
            rows: Vec::new(),
            metadata: ReportMetadata { config_hash, base_seed, wall_time_secs: 0.0 },
        })
    }

    pub fn push(&mut self, n: usize, metric: &str, value: f64, stderr: f64, seed: u64) {
        self.rows.push(ReportRow {
            experiment: self.experiment.clone(),
            n,
            metric: metric.to_string(),
            value,
            stderr,
            seed,
        });
    }

    pub fn set_wall_time(&mut self, elapsed: Duration) {
        self.metadata.wall_time_secs = elapsed.as_secs_f64();
    }

    /// Rows for `metric` in report order.
    pub fn metric(&self, metric: &str) -> impl Iterator<Item = &ReportRow> {
        let metric = metric.to_string();
        self.rows.iter().filter(move |r| r.metric == metric)
    }

    /// The row for `metric` at sample size `n`.
    pub fn get(&self, n: usize, metric: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.n == n && r.metric == metric)
    }

    /// Values of `metric` in report order.
    pub fn values(&self, metric: &str) -> Vec<f64> {
        self.metric(metric).map(|r| r.value).collect()
    }

    /// CSV with a fixed column order. Contains no timing, so equal configs
    /// give byte-identical output.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(out, "{},{},{},{:?},{:?},{}", r.experiment, r.n, r.metric, r.value, r.stderr, r.seed).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One line per row, for progress output.
    pub fn summary_lines(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| format!("{} n={} {} = {:.6} ± {:.6}", r.experiment, r.n, r.metric, r.value, r.stderr))
            .collect()
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}
