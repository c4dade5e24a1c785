use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("bit sequence has odd length {0}")]
    OddBitCount(usize),

    #[error("bit value {0} is not 0 or 1")]
    InvalidBit(u8),

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("transform length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("half length must be at least 1")]
    ZeroHalfLength,

    #[error("stream of {len} samples is shorter than two half-windows ({needed})")]
    StreamTooShort { len: usize, needed: usize },

    #[error("channel has no taps")]
    EmptyChannel,

    #[error("invalid channel tap: {0}")]
    InvalidTap(String),

    #[error("noise variance {0} must be finite and non-negative")]
    InvalidNoise(f64),

    #[error("metric is empty")]
    EmptyMetric,

    #[error("invalid peak search: {0}")]
    InvalidPeakSearch(String),

    #[error("trial count must be at least 1")]
    NoTrials,
}
