use thiserror::Error;

/// Failures raised by the numerical kernel and the operator constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("QR iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("matrix exponential overflowed")]
    Overflow,

    #[error("lambda = {lambda} lies in the spectrum of A0")]
    LambdaInSpectrum { lambda: String },

    #[error("lambda = 0 is not in the resolvent set of the block generator")]
    LambdaZero,

    #[error("0 lies in the spectrum of A0; use the quadrature path for Q(t)")]
    ZeroInSpectrum,

    #[error("operation requires a feedback operator B")]
    MissingFeedback,

    #[error("transport coefficient must be non-negative, got k = {0}")]
    InvalidK(f64),

    #[error("explicit step dt = {dt} exceeds stability limit {limit}")]
    UnstableStep { dt: f64, limit: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
