use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("equilibrium solver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("unstable configuration: Hessian eigenvalue {eigenvalue:e} is not positive")]
    Instability { eigenvalue: f64 },

    #[error("integration accuracy lost: norm drift {drift:e} exceeds {tolerance:e}")]
    IntegrationAccuracy { drift: f64, tolerance: f64 },

    #[error("ion index {index} out of range for {n_ions} ions")]
    Index { index: usize, n_ions: usize },

    #[error("{model} does not define {quantity}")]
    UnsupportedModel {
        model: &'static str,
        quantity: &'static str,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}
