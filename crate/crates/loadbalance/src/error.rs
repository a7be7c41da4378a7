use learnaug_core::{ArithError, CoreError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LbError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("at least one machine is required")]
    NoMachines,
    #[error("job type has {got} processing times, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error("job type {0} cannot run on any machine")]
    Unschedulable(usize),
    #[error("processing times must be positive")]
    NonPositiveTime,
    #[error("frequencies sum to {0}, expected 1")]
    FrequencySum(String),
    #[error("frequency {freq} of type {ty} is not a multiple of {delta}")]
    Granularity { ty: usize, freq: String, delta: String },
    #[error("hypothesis class is empty")]
    EmptyClass,
    #[error("unknown job type index {0}")]
    UnknownType(usize),
    #[error("scaling factor must be at least 1")]
    ZeroScaling,
    #[error("exact scheduling exceeds the search cap ({0})")]
    TooLarge(String),
    #[error("{0} must be a power of two")]
    NotPowerOfTwo(&'static str),
    #[error("the instance has no jobs")]
    EmptyInstance,
    #[error("class file: {0}")]
    Format(String),
}
