//! Online makespan minimization on unrelated machines with learned job-type
//! frequencies.
//!
//! A hypothesis is a frequency table over job types. Scaled copies of the
//! hypotheses are turned into count predictions, jobs are routed along
//! offline schedules of those predictions, and a doubling guess of the
//! optimal makespan recovers from wrong hypotheses. Prediction-free online
//! policies, a robust fallback, a randomized portfolio combiner and a
//! restricted-assignment adversary complete the toolkit.

pub mod adversary;
pub mod error;
pub mod model;
pub mod offline;
pub mod online;
pub mod portfolio;
pub mod predictor;
pub mod runner;

pub use adversary::{lb_adversary, LbAdversaryRun};
pub use error::LbError;
pub use model::{
    hypothesis_error, scale_hypothesis, ErrorPair, JobType, LbClass, LbClassFile, LbHypothesis, LbInstance, Schedule, TypeSet,
};
pub use offline::{exact_opt, find_scaling, offline_schedule, OfflineSchedule, Scaled, SchedulerMode};
pub use online::{anr_online, CappedRun, ExpPotential, FastestMachine, GreedyLoad, LbPolicy};
pub use portfolio::{portfolio_combiner, PortfolioRun};
pub use predictor::{lower_median, LbEvent, LbPredictor, MedianPredictor, RandomPredictor};
pub use runner::{
    assign_with_prediction, default_gamma, doubling_runner, robust_runner, EpochReport, FeedState, IterationStats, LbRun, Predictor,
    PredictorKind, RunnerConfig,
};
