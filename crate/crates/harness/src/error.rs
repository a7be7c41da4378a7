use learnaug_caching::CachingError;
use learnaug_core::{ArithError, CoreError};
use learnaug_loadbalance::LbError;
use learnaug_nonclairvoyant::SchedError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("caching: {0}")]
    Caching(#[from] CachingError),
    #[error("load balancing: {0}")]
    Lb(#[from] LbError),
    #[error("scheduling: {0}")]
    Sched(#[from] SchedError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("infeasible generator target: {0}")]
    Infeasible(String),
}
