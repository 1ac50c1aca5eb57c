use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mode {mode} out of range for a {n_modes}-mode state")]
    InvalidMode { mode: usize, n_modes: usize },

    #[error("covariance is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("non-finite entry in mean or covariance")]
    NonFinite,

    #[error("unphysical state: smallest symplectic eigenvalue {0} < 1")]
    Unphysical(f64),

    #[error("unphysical source: v_sq * v_as = {product} < 1")]
    UnphysicalSource { product: f64 },

    #[error(
        "metric is not monotone in gain: {metric}({g_lo}) = {v_lo} > {metric}({g_hi}) = {v_hi}"
    )]
    NonMonotone {
        metric: &'static str,
        g_lo: f64,
        v_lo: f64,
        g_hi: f64,
        v_hi: f64,
    },

    #[error("covariance factorization failed")]
    Factorization,

    #[error("invalid gain at index {index}: {source}")]
    SweepPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
