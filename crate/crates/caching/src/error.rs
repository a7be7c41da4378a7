use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CachingError {
    #[error("cache size must be at least 1")]
    ZeroCache,
    #[error("page {page} at position {position} is outside the universe of {universe} pages")]
    PageOutOfRange {
        page: usize,
        position: usize,
        universe: usize,
    },
    #[error("hypothesis class is empty")]
    EmptyClass,
    #[error("hypothesis {index} has length {len}, expected {expected}")]
    LengthMismatch {
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("instance exceeds brute-force cap (universe {universe} > 6 or length {len} > 12)")]
    TooLarge { universe: usize, len: usize },
    #[error("no hypothesis is consistent with the requests seen so far")]
    Exhausted,
    #[error("{0} must be a power of two")]
    NotPowerOfTwo(&'static str),
    #[error("current hypothesis {0} has zero probability")]
    ImpossibleState(usize),
    #[error("request at time {t} beyond the predicted horizon {horizon}")]
    BeyondHorizon { t: usize, horizon: usize },
    #[error("instance file: {0}")]
    Format(String),
}
