//! Python bindings: models, processes, quantiles, the circular block
//! bootstrap and the experiment runners. Configs and reports cross the
//! boundary as JSON strings with the same layout as the CLI.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use quantmix_core as core;
use quantmix_core::experiments as exp;

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::DegenerateLongRunVariance { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sample(values: Vec<f64>) -> PyResult<core::Sample> {
    core::Sample::from_values(values).map_err(err)
}

/// Marginal distribution: a power-local model or a Gaussian.
#[pyclass(name = "Model", module = "quantmix", frozen)]
struct PyModel(core::DistributionModel);

#[pymethods]
impl PyModel {
    /// F(t) = p + M |t - tp|^rho sgn(t - tp) on its support.
    #[staticmethod]
    #[pyo3(signature = (rho, m, tp = 0.0, p = 0.5))]
    fn power_local(rho: f64, m: f64, tp: f64, p: f64) -> PyResult<Self> {
        Ok(Self(core::PowerLocalModel::new(rho, m, tp, p).map_err(err)?.into()))
    }

    #[staticmethod]
    #[pyo3(signature = (mean = 0.0, sd = 1.0))]
    fn gaussian(mean: f64, sd: f64) -> PyResult<Self> {
        Ok(Self(core::GaussianModel::new(mean, sd).map_err(err)?.into()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(serde_json::from_str(text).map_err(json_err)?))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn cdf(&self, t: f64) -> f64 {
        self.0.cdf(t)
    }

    fn quantile(&self, q: f64) -> PyResult<f64> {
        self.0.quantile(q).map_err(err)
    }

    /// (rho, m, t_p) of the local expansion at level p.
    #[pyo3(signature = (p = 0.5))]
    fn local_expansion(&self, p: f64) -> PyResult<(f64, f64, f64)> {
        let l = self.0.local_expansion(p).map_err(err)?;
        Ok((l.rho, l.m_coef, l.t_p))
    }

    fn __repr__(&self) -> String {
        format!("Model({})", self.to_json().unwrap_or_default())
    }
}

/// g(x) = M |x|^rho sgn(x).
#[pyclass(name = "GTransform", module = "quantmix", frozen)]
struct PyGTransform(core::GTransform);

#[pymethods]
impl PyGTransform {
    #[new]
    fn new(rho: f64, m: f64) -> PyResult<Self> {
        Ok(Self(core::GTransform::new(rho, m).map_err(err)?))
    }

    fn apply(&self, x: f64) -> f64 {
        self.0.apply(x)
    }

    fn inverse(&self, y: f64) -> f64 {
        self.0.inverse(y)
    }
}

/// Stationary process with a given marginal.
#[pyclass(name = "Process", module = "quantmix", frozen)]
struct PyProcess(core::ProcessSpec);

#[pymethods]
impl PyProcess {
    #[staticmethod]
    fn iid(marginal: &PyModel) -> Self {
        Self(core::ProcessSpec::iid(marginal.0))
    }

    #[staticmethod]
    fn gauss_ar1(phi: f64, marginal: &PyModel) -> PyResult<Self> {
        Ok(Self(core::ProcessSpec::gauss_ar1(phi, marginal.0).map_err(err)?))
    }

    #[staticmethod]
    fn m_dependent(weights: Vec<f64>, marginal: &PyModel) -> PyResult<Self> {
        Ok(Self(core::ProcessSpec::m_dependent(weights, marginal.0).map_err(err)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(serde_json::from_str(text).map_err(json_err)?))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn generate(&self, n: usize, seed: u64) -> PyResult<Vec<f64>> {
        Ok(core::generate(&self.0, n, seed).map_err(err)?.values().to_vec())
    }

    fn mixing_note(&self) -> String {
        self.0.mixing_note()
    }

    fn __repr__(&self) -> String {
        format!("Process({})", self.0.id())
    }
}

#[pyfunction]
fn ecdf_eval(values: Vec<f64>, t: f64) -> PyResult<f64> {
    Ok(core::Ecdf::from_vec(values).map_err(err)?.eval(t))
}

#[pyfunction]
fn empirical_quantile(values: Vec<f64>, q: f64) -> PyResult<f64> {
    core::Ecdf::from_vec(values).map_err(err)?.quantile(q).map_err(err)
}

/// Bahadur decomposition as a dict with keys empirical_quantile,
/// linearized_term, remainder, scaled_remainder and size.
#[pyfunction]
#[pyo3(signature = (values, rho, m, tp = 0.0, p = 0.5))]
fn bahadur_decompose(py: Python<'_>, values: Vec<f64>, rho: f64, m: f64, tp: f64, p: f64) -> PyResult<Py<PyAny>> {
    core::GTransform::new(rho, m).map_err(err)?;
    let local = core::LocalExpansion { rho, m_coef: m, t_p: tp, p };
    let d = core::bahadur_decompose(&sample(values)?, &local).map_err(err)?;
    let json = serde_json::to_string(&d).map_err(json_err)?;
    Ok(py.import("json")?.call_method1("loads", (json,))?.unbind())
}

/// One circular block bootstrap resample: (values, zero-based block starts).
#[pyfunction]
fn resample(values: Vec<f64>, l: usize, seed: u64) -> PyResult<(Vec<f64>, Vec<usize>)> {
    let bs = core::resample(&sample(values)?, l, seed).map_err(err)?;
    Ok((bs.values().to_vec(), bs.block_starts().to_vec()))
}

#[pyfunction]
fn expected_bootstrap_ecdf(values: Vec<f64>, l: usize, t: f64) -> PyResult<f64> {
    core::expected_bootstrap_ecdf(&sample(values)?, l, t).map_err(err)
}

/// `schedule` is JSON such as {"kind": "dyadic_power", "c": 1, "gamma": 0.5}.
#[pyfunction]
fn block_length(schedule: &str, n: usize) -> PyResult<usize> {
    let s: core::BlockLengthSchedule = serde_json::from_str(schedule).map_err(json_err)?;
    Ok(s.block_length(n))
}

/// Two-sample Kolmogorov-Smirnov distance.
#[pyfunction]
fn ks_distance(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    let a = core::Ecdf::from_vec(a).map_err(err)?;
    let b = core::Ecdf::from_vec(b).map_err(err)?;
    Ok(exp::ks_two_sample(&a, &b))
}

#[pyfunction]
fn sample_limit_law(rho: f64, m: f64, sigma_lr: f64, count: usize, seed: u64) -> PyResult<Vec<f64>> {
    let spec = exp::LimitLawSpec::new(rho, m, sigma_lr).map_err(err)?;
    Ok(exp::sample_limit_law(&spec, count, seed))
}

#[pyfunction]
#[pyo3(signature = (rho, m, sigma_lr, count, inner_count = 5000, seed = 0))]
fn z_rho_sampler(rho: f64, m: f64, sigma_lr: f64, count: usize, inner_count: usize, seed: u64) -> PyResult<Vec<f64>> {
    exp::z_rho_sampler(rho, m, sigma_lr, count, inner_count, seed).map_err(err)
}

/// (estimate, stderr) of the long-run variance of sqrt(n) F_n(t_p).
#[pyfunction]
#[pyo3(signature = (process, p = 0.5, n = 16384, replicates = 1000, seed = 0))]
fn long_run_variance(process: &PyProcess, p: f64, n: usize, replicates: usize, seed: u64) -> PyResult<(f64, f64)> {
    let local = process.0.marginal().local_expansion(p).map_err(err)?;
    let e = exp::long_run_variance_oracle(&process.0, &local, n, replicates, seed).map_err(err)?;
    Ok((e.value, e.stderr))
}

/// Runs an experiment by CLI name (clt, bahadur, boot-consistency,
/// single-stream, inconsistency, zrho, lrvar) on a JSON config and returns
/// the report as JSON.
#[pyfunction]
fn run_experiment(py: Python<'_>, name: &str, config: &str) -> PyResult<String> {
    let name = name.to_string();
    let config = config.to_string();
    py.detach(move || {
        let report = if name == "zrho" {
            let cfg: exp::ZRhoConfig = serde_json::from_str(&config).map_err(json_err)?;
            exp::run_zrho_experiment(&cfg)
        } else {
            let cfg: exp::McConfig = serde_json::from_str(&config).map_err(json_err)?;
            match name.as_str() {
                "clt" => exp::run_clt_experiment(&cfg),
                "bahadur" => exp::run_bahadur_experiment(&cfg),
                "boot-consistency" => exp::run_bootstrap_consistency_experiment(&cfg),
                "single-stream" => exp::run_strong_consistency_experiment(&cfg),
                "inconsistency" => exp::run_inconsistency_experiment(&cfg),
                "lrvar" => exp::run_lrvar_experiment(&cfg),
                other => return Err(PyValueError::new_err(format!("unknown experiment `{other}`"))),
            }
        };
        report.map_err(err)?.to_json().map_err(err)
    })
}

#[pymodule]
fn quantmix(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyGTransform>()?;
    m.add_class::<PyProcess>()?;
    m.add_function(wrap_pyfunction!(ecdf_eval, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(bahadur_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(resample, m)?)?;
    m.add_function(wrap_pyfunction!(expected_bootstrap_ecdf, m)?)?;
    m.add_function(wrap_pyfunction!(block_length, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance, m)?)?;
    m.add_function(wrap_pyfunction!(sample_limit_law, m)?)?;
    m.add_function(wrap_pyfunction!(z_rho_sampler, m)?)?;
    m.add_function(wrap_pyfunction!(long_run_variance, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
