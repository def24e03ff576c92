use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("{function} diverges at the requested arguments")]
    Divergence { function: &'static str },

    #[error("{what} did not converge (best estimate {best_estimate}, error estimate {error_estimate})")]
    Convergence {
        what: &'static str,
        best_estimate: f64,
        error_estimate: f64,
    },

    #[error("root search failed: {reason}; residual trace: {trace:?}")]
    SearchFailure {
        reason: String,
        /// `(k, mu, r1, r2)` for the last iterates visited.
        trace: Vec<(f64, f64, f64, f64)>,
    },

    #[error("range error: {0}")]
    Range(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        function,
        detail: detail.into(),
    }
}
