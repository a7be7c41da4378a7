//! Shared primitives for the learning-augmented online algorithm tracks:
//! exact rationals, addressable random streams and run ledgers.

pub mod error;
pub mod ledger;
pub mod rational;
pub mod rng;

pub use error::{ArithError, CoreError};
pub use ledger::{ledger_merge, mean_stderr, LedgerSummary, MetricSummary, Problem, RunRecord};
pub use rational::{rational_arith, ArithOp, ArithResult, Rational};
pub use rng::RngStream;
