use learnaug_core::{ArithError, CoreError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchedError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("instance has no jobs")]
    Empty,
    #[error("job {job} has length {value}, outside (0, 1]")]
    InvalidLength { job: usize, value: String },
    #[error("job {job} has length {value}, expected {lambda} or 1")]
    NotTwoLength { job: usize, value: String, lambda: String },
    #[error("short length {0} must lie in [0, 1)")]
    InvalidLambda(String),
    #[error("hypothesis class is empty")]
    EmptyClass,
    #[error("hypothesis {index} covers {len} jobs, expected {expected}")]
    Arity { index: usize, len: usize, expected: usize },
    #[error("hypothesis {0} is not a permutation of the jobs")]
    NotPermutation(usize),
    #[error("policy selected finished or unknown job {0}")]
    CompletedJob(usize),
    #[error("policy rates are invalid: {0}")]
    InvalidRates(String),
    #[error("no hypothesis is consistent with the processing observed so far")]
    Exhausted,
    #[error("speed share must lie in (0, 1), got {0}")]
    InvalidSpeed(String),
    #[error("needs at least {need} jobs, got {n}")]
    TooFewJobs { n: usize, need: usize },
    #[error("the construction needs at least two hypotheses")]
    TooFewHypotheses,
    #[error("instance file: {0}")]
    Format(String),
}
