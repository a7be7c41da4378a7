//! Non-clairvoyant single-machine scheduling to minimize total completion
//! time, with hypothesis classes over job lengths or job orderings.
//!
//! Everything runs on an exact event-driven simulator: policies see only how
//! long each job has been processed and which jobs are done.

pub mod adversary;
pub mod agnostic;
pub mod baseline;
pub mod error;
pub mod model;
pub mod realizable;
pub mod sim;
pub mod two_length;

pub use adversary::{three_length_adversary, three_length_bound, three_length_class, IndexOrder, RandomOrder, ThreeLengthOutcome, UnitPolicy, UnitView};
pub use agnostic::{agnostic_run, sample_pairs, sample_size, AgnosticPolicy, AgnosticRun, PairSample};
pub use baseline::{round_robin, speed_split};
pub use error::SchedError;
pub use model::{is_permutation, mu_weight, order_cost, sjf_opt, SchedClass, SchedInstance};
pub use realizable::{predictive_spjf, within_switch_bound, MinConsistentPredictor, PredictiveSpjf, SchedRun, SpjfChecks};
pub use sim::{simulate, Decision, FixedOrder, RoundRobin, SchedPolicy, SimState, SimView, SpeedSplit};
pub use two_length::{two_length_run, TwoLengthPolicy};
