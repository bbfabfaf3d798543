use thiserror::Error;

/// Errors raised by model construction, sampling and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability must lie in (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("sample must contain at least one value")]
    EmptySample,

    #[error("sample contains a non-finite value at index {0}")]
    NonFinite(usize),

    #[error("block length must satisfy 1 <= l <= n, got l = {l}, n = {n}")]
    BlockLength { l: usize, n: usize },

    /// The long-run variance of `sqrt(n) F_n(t_p)` could not be distinguished
    /// from zero, so the normal limit of the quantile error degenerates.
    #[error(
        "long-run variance estimate {estimate:.6} is within 3 standard errors ({stderr:.6}) of zero"
    )]
    DegenerateLongRunVariance { estimate: f64, stderr: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_probability(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(q))
    }
}
