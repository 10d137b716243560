use thiserror::Error;

/// Errors raised by the solvers and the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// The potential violates the admissibility bounds.
    #[error("invalid potential: {reason}")]
    InvalidPotential { reason: String, k: Option<f64> },

    /// Adaptive quadrature ran out of subdivisions before reaching the tolerance.
    #[error(
        "quadrature did not converge: estimated error {achieved:.3e} > requested {requested:.3e}"
    )]
    Quadrature { achieved: f64, requested: f64 },

    /// A bracketing root or extremum search failed.
    #[error("{context}: no bracket found on [{lo}, {hi}]")]
    Bracket { context: String, lo: f64, hi: f64 },

    /// An iterative solver stopped without meeting its tolerance.
    #[error("{context}: no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        context: String,
        iterations: usize,
        residual: f64,
    },

    /// The chemical-potential scan ended before the question could be settled.
    #[error("scan range exhausted: {0}")]
    ScanExhausted(String),

    /// Every Laplace weight underflowed.
    #[error("all weights underflow: {0}")]
    Underflow(String),

    /// Invalid run configuration.
    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for configuration problems (exit code 2); everything else is numeric (exit code 3).
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::InvalidPotential { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
