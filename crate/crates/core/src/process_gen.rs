//! Stationary, strongly mixing sequences with an exact marginal law.
//!
//! A stationary standard Gaussian latent series `Z` is pushed through
//! `X_i = F^{-1}(Phi(Z_i))`. The monotone transform leaves the mixing
//! coefficients of `Z` unchanged, so the mixing rate of `X` is known
//! analytically: geometric for the AR(1) latent, zero beyond lag `m` for
//! the moving average.

use std::fmt::Write as _;
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dist_models::{normal_cdf, DistributionModel};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Dependence structure of the latent Gaussian series.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessKind {
    Iid,
    /// `Z_i = phi Z_{i-1} + sqrt(1 - phi^2) e_i`, started from `N(0, 1)`.
    GaussAr1 { phi: f64 },
    /// `Z_i = sum_k w_k e_{i+k} / |w|` with `m + 1` weights.
    MDependent { m: usize, weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProcessRepr", into = "ProcessRepr")]
pub struct ProcessSpec {
    kind: ProcessKind,
    marginal: DistributionModel,
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, marginal: DistributionModel) -> Result<Self> {
        match &kind {
            ProcessKind::Iid => {}
            ProcessKind::GaussAr1 { phi } => {
                if !(phi.is_finite() && phi.abs() < 1.0) {
                    return Err(Error::InvalidParameter(format!("|phi| must be < 1, got {phi}")));
                }
            }
            ProcessKind::MDependent { m, weights } => {
                if weights.len() != m + 1 {
                    return Err(Error::InvalidParameter(format!(
                        "m-dependent process needs m + 1 = {} weights, got {}",
                        m + 1,
                        weights.len()
                    )));
                }
                if weights.iter().any(|w| !w.is_finite()) || weights.iter().all(|&w| w == 0.0) {
                    return Err(Error::InvalidParameter(
                        "weights must be finite with at least one nonzero entry".into(),
                    ));
                }
            }
        }
        Ok(Self { kind, marginal })
    }

    pub fn iid(marginal: impl Into<DistributionModel>) -> Self {
        Self { kind: ProcessKind::Iid, marginal: marginal.into() }
    }

    pub fn gauss_ar1(phi: f64, marginal: impl Into<DistributionModel>) -> Result<Self> {
        Self::new(ProcessKind::GaussAr1 { phi }, marginal.into())
    }

    pub fn m_dependent(weights: Vec<f64>, marginal: impl Into<DistributionModel>) -> Result<Self> {
        let m = weights.len().saturating_sub(1);
        Self::new(ProcessKind::MDependent { m, weights }, marginal.into())
    }

    pub fn kind(&self) -> &ProcessKind {
        &self.kind
    }

    pub fn marginal(&self) -> &DistributionModel {
        &self.marginal
    }

    pub fn with_marginal(&self, marginal: DistributionModel) -> Self {
        Self { kind: self.kind.clone(), marginal }
    }

    /// Analytic statement of the strong mixing rate.
    pub fn mixing_note(&self) -> String {
        match &self.kind {
            ProcessKind::Iid => "independent: alpha(k) = 0 for k >= 1".into(),
            ProcessKind::GaussAr1 { phi } => format!(
                "Gaussian AR(1) copula, phi = {phi}: alpha(k) decays geometrically (O(|phi|^k)), summable"
            ),
            ProcessKind::MDependent { m, .. } => {
                format!("{m}-dependent moving-average copula: alpha(k) = 0 for k > {m}")
            }
        }
    }

    /// Short provenance tag, e.g. `gauss_ar1(phi=0.5)/gaussian`.
    pub fn id(&self) -> String {
        let kind = match &self.kind {
            ProcessKind::Iid => "iid".to_string(),
            ProcessKind::GaussAr1 { phi } => format!("gauss_ar1(phi={phi})"),
            ProcessKind::MDependent { m, .. } => format!("m_dependent(m={m})"),
        };
        let marginal = match &self.marginal {
            DistributionModel::PowerLocal(m) => format!("power_local(rho={},m={})", m.rho(), m.m_coef()),
            DistributionModel::Gaussian(g) => format!("gaussian({},{})", g.mean(), g.sd()),
        };
        format!("{kind}/{marginal}")
    }
}

/// Autocorrelation of the latent Gaussian series at `lag`.
pub fn latent_lag_correlation(spec: &ProcessSpec, lag: usize) -> f64 {
    match &spec.kind {
        ProcessKind::Iid => {
            if lag == 0 {
                1.0
            } else {
                0.0
            }
        }
        ProcessKind::GaussAr1 { phi } => phi.powi(lag as i32),
        ProcessKind::MDependent { weights, .. } => {
            if lag >= weights.len() {
                return 0.0;
            }
            let norm: f64 = weights.iter().map(|w| w * w).sum();
            let cross: f64 = weights.iter().zip(&weights[lag..]).map(|(a, b)| a * b).sum();
            cross / norm
        }
    }
}

/// An observed series `X_1, ..., X_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    spec_id: String,
    seed: u64,
}

impl Sample {
    pub fn new(values: Vec<f64>, spec_id: impl Into<String>, seed: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values, spec_id: spec_id.into(), seed })
    }

    /// A sample with no provenance, for ad hoc data.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, "manual", 0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spec_id(&self) -> &str {
        &self.spec_id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The first `n` observations, keeping provenance.
    pub fn prefix(&self, n: usize) -> Result<Sample> {
        if n == 0 || n > self.values.len() {
            return Err(Error::InvalidParameter(format!(
                "prefix length {n} outside 1..={}",
                self.values.len()
            )));
        }
        Ok(Sample { values: self.values[..n].to_vec(), spec_id: self.spec_id.clone(), seed: self.seed })
    }

    /// Single-column CSV with a comment header carrying the spec and seed.
    pub fn write_csv<W: Write>(&self, spec: &ProcessSpec, mut out: W) -> Result<()> {
        let mut text = String::with_capacity(self.values.len() * 20 + 256);
        writeln!(text, "# spec: {}", serde_json::to_string(spec)?).unwrap();
        writeln!(text, "# seed: {}", self.seed).unwrap();
        writeln!(text, "# n: {}", self.values.len()).unwrap();
        text.push_str("value\n");
        for v in &self.values {
            writeln!(text, "{v}").unwrap();
        }
        out.write_all(text.as_bytes())?;
        Ok(())
    }
}

/// Draws `n` observations; deterministic in `(spec, n, seed)`.
pub fn generate(spec: &ProcessSpec, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let latent = latent_series(&spec.kind, n, seed);
    let values = match spec.marginal {
        // F^{-1}(Phi(z)) is affine in z; skip the round trip through (0, 1).
        DistributionModel::Gaussian(g) => latent.into_iter().map(|z| g.mean() + g.sd() * z).collect(),
        marginal => latent.into_iter().map(|z| marginal.transform_uniform(normal_cdf(z))).collect(),
    };
    Sample::new(values, spec.id(), seed)
}

/// Stationary standard Gaussian latent path of length `n`.
pub fn latent_series(kind: &ProcessKind, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let mut draw = || -> f64 { rng.sample(StandardNormal) };
    match kind {
        ProcessKind::Iid => (0..n).map(|_| draw()).collect(),
        ProcessKind::GaussAr1 { phi } => {
            let innovation_sd = (1.0 - phi * phi).sqrt();
            let mut z = draw();
            let mut out = Vec::with_capacity(n);
            out.push(z);
            for _ in 1..n {
                z = phi * z + innovation_sd * draw();
                out.push(z);
            }
            out
        }
        ProcessKind::MDependent { weights, .. } => {
            let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
            let w: Vec<f64> = weights.iter().map(|w| w / norm).collect();
            let noise: Vec<f64> = (0..n + w.len() - 1).map(|_| draw()).collect();
            noise.windows(w.len()).map(|win| win.iter().zip(&w).map(|(e, c)| e * c).sum()).collect()
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProcessRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    marginal: DistributionModel,
    /// Informational; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mixing_note: Option<String>,
}

impl TryFrom<ProcessRepr> for ProcessSpec {
    type Error = Error;

    fn try_from(r: ProcessRepr) -> Result<Self> {
        let unexpected = |field: &str| {
            Error::InvalidParameter(format!("field `{field}` does not apply to process kind `{}`", r.kind))
        };
        let kind = match r.kind.as_str() {
            "iid" => {
                if r.phi.is_some() {
                    return Err(unexpected("phi"));
                }
                if r.weights.is_some() || r.m.is_some() {
                    return Err(unexpected("weights"));
                }
                ProcessKind::Iid
            }
            "gauss_ar1" => {
                if r.weights.is_some() || r.m.is_some() {
                    return Err(unexpected("weights"));
                }
                let phi = r.phi.ok_or_else(|| Error::InvalidParameter("gauss_ar1 requires `phi`".into()))?;
                ProcessKind::GaussAr1 { phi }
            }
            "m_dependent" => {
                if r.phi.is_some() {
                    return Err(unexpected("phi"));
                }
                let weights = r
                    .weights
                    .clone()
                    .ok_or_else(|| Error::InvalidParameter("m_dependent requires `weights`".into()))?;
                let m = r.m.unwrap_or(weights.len().saturating_sub(1));
                ProcessKind::MDependent { m, weights }
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown process kind `{other}` (expected iid, gauss_ar1 or m_dependent)"
                )))
            }
        };
        ProcessSpec::new(kind, r.marginal)
    }
}

impl From<ProcessSpec> for ProcessRepr {
    fn from(spec: ProcessSpec) -> Self {
        let mixing_note = Some(spec.mixing_note());
        let (kind, phi, m, weights) = match spec.kind {
            ProcessKind::Iid => ("iid", None, None, None),
            ProcessKind::GaussAr1 { phi } => ("gauss_ar1", Some(phi), None, None),
            ProcessKind::MDependent { m, weights } => ("m_dependent", None, Some(m), Some(weights)),
        };
        ProcessRepr { kind: kind.into(), phi, m, weights, marginal: spec.marginal, mixing_note }
    }
}
