//! Caching with a class of predicted request sequences.
//!
//! The offline optimum is Belady's furthest-in-the-future rule. Online, the
//! algorithms follow the FitF schedule of a maintained prediction: a majority
//! vote over consistent hypotheses when the input is one of them, and HEDGE
//! with a switching-minimal coupling otherwise. A robust wrapper bounds any of
//! them by randomized marking, and two adversaries exhibit the lower bounds.

pub mod adversary;
pub mod error;
pub mod fitf;
pub mod hedge;
pub mod instance;
pub mod majority;
pub mod marking;
pub mod policy;
pub mod predictive;
pub mod robust;

pub use adversary::{adversary_prediction_error, adversary_realizable, block_class, AdversaryOutcome};
pub use error::CachingError;
pub use fitf::{brute_force_opt, fitf_cost, fitf_on, fitf_schedule, EvictionSchedule};
pub use hedge::{coupling_sample, hedge_update, total_variation, HedgePredictor, HedgeState};
pub use instance::{CacheHypothesisClass, CachingFile, CachingInstance, PageId};
pub use majority::{CachePredictionStream, CachePredictor, MajorityPredictor, PredictionStep};
pub use marking::{marking_algorithm, RandomizedMarking};
pub use policy::{run_policy, CachePolicy, CacheTracker, EvictSoonest, Lru};
pub use predictive::{serve_with_prediction, PredictiveCache, ServeMode};
pub use robust::{robustify_cache, RobustCache};
