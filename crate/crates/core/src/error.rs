use thiserror::Error;

/// Errors produced by the simulation and analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation too small: tail mass {tail:.3e} exceeds tolerance {tau:.3e}")]
    TruncationTooSmall { tail: f64, tau: f64 },

    #[error("factorial moment order ({m_a},{m_b}) exceeds detector bins D={d_bins}")]
    OrderTooHigh {
        m_a: usize,
        m_b: usize,
        d_bins: usize,
    },

    #[error("factorial moment M({0},{1}) is required but missing")]
    MissingOrder(usize, usize),

    #[error("insufficient data: {shots} shots (need at least 2)")]
    InsufficientData { shots: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
