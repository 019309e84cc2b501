use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Mass near the edge of a periodic box exceeded the allowed leakage.
    #[error("domain truncation: boundary mass {leakage:.3e} exceeds {limit:.1e}")]
    DomainTruncation { leakage: f64, limit: f64 },

    #[error(
        "insufficient resolution for {what}: achieved {achieved:.3e}, required {required:.3e}"
    )]
    Resolution {
        what: &'static str,
        achieved: f64,
        required: f64,
    },

    #[error("singular phase: |cos t| = {cos_t:.3e} is below 1e-3")]
    SingularPhase { cos_t: f64 },

    #[error("finite-difference and analytic jacobians disagree by {discrepancy:.3e} (allowed {allowed:.3e})")]
    InconsistentFamily { discrepancy: f64, allowed: f64 },

    #[error("degenerate band: smallest averaged value is {0:.3e}")]
    DegenerateBand(f64),

    #[error("order-swap inconsistency: gap {gap:.3e} exceeds {allowed:.3e}")]
    OrderSwap { gap: f64, allowed: f64 },

    #[error("non-finite value at quadrature node {node}")]
    NonFinite { node: usize },

    #[error("eigensolver failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
