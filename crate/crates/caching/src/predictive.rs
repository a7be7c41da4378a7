//! Serving requests by following the FitF solution of the current prediction.

use std::collections::BTreeSet;

use learnaug_core::{Problem, Rational, RunRecord};

use crate::error::CachingError;
use crate::fitf::{fitf_cost, fitf_on, EvictionSchedule};
use crate::instance::{CachingInstance, PageId};
use crate::majority::CachePredictor;
use crate::policy::{CachePolicy, CacheTracker};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ServeMode {
    /// A wrong prediction is an error: the predictor ran out of hypotheses.
    Realizable,
    /// A wrong prediction is absorbed by an ad-hoc load.
    Agnostic,
}

/// Online policy that keeps its cache equal to the FitF schedule of the
/// prediction, recomputing that schedule whenever the prediction changes.
///
/// On a mistake in agnostic mode the requested page is loaded ad hoc over the
/// smallest-id page other than it; the next step moves back to the schedule.
pub struct PredictiveCache<P> {
    k: usize,
    mode: ServeMode,
    predictor: P,
    schedule: Option<EvictionSchedule>,
    tracker: CacheTracker,
    adhoc_loads: u64,
}

impl<P: CachePredictor> PredictiveCache<P> {
    pub fn new(k: usize, predictor: P, mode: ServeMode) -> Self {
        PredictiveCache {
            k,
            mode,
            predictor,
            schedule: None,
            tracker: CacheTracker::new(),
            adhoc_loads: 0,
        }
    }

    pub fn predictor(&self) -> &P {
        &self.predictor
    }

    /// Loads caused by mistakes (ad-hoc loads only).
    pub fn adhoc_loads(&self) -> u64 {
        self.adhoc_loads
    }
}

impl<P: CachePredictor> CachePolicy for PredictiveCache<P> {
    fn name(&self) -> &str {
        match self.mode {
            ServeMode::Realizable => "predictive-realizable",
            ServeMode::Agnostic => "predictive-agnostic",
        }
    }

    fn serve(&mut self, t: usize, page: PageId) -> Result<u64, CachingError> {
        let step = self.predictor.observe(t, page)?;
        if step.changed || self.schedule.is_none() {
            self.schedule = Some(fitf_on(self.predictor.prediction(), self.k));
        }
        let schedule = self.schedule.as_ref().expect("schedule computed");
        let mut loads = self.tracker.move_to(schedule.cache_at(t));
        if !self.tracker.contains(page) {
            if self.mode == ServeMode::Realizable {
                return Err(CachingError::Exhausted);
            }
            if self.tracker.len() >= self.k {
                let victim = *self
                    .tracker
                    .pages()
                    .iter()
                    .find(|&&p| p != page)
                    .expect("full cache holds another page");
                // reloaded, if still scheduled, when moving back next step
                self.tracker.evict(victim);
            }
            self.adhoc_loads += 1;
            loads += self.tracker.load(page);
        }
        Ok(loads)
    }

    fn cache(&self) -> &BTreeSet<PageId> {
        self.tracker.pages()
    }

    fn cost(&self) -> u64 {
        self.tracker.cost()
    }
}

/// Runs the prediction-following algorithm over `instance` and records
/// cost, offline optimum, switches and mistakes.
pub fn serve_with_prediction<P: CachePredictor>(
    instance: &CachingInstance,
    predictor: P,
    mode: ServeMode,
    seed: u64,
) -> Result<RunRecord, CachingError> {
    let mut alg = PredictiveCache::new(instance.k, predictor, mode);
    for (t, &r) in instance.requests.iter().enumerate() {
        alg.serve(t, r)?;
    }
    let stream = alg.predictor().stream();
    let opt = fitf_cost(&instance.requests, instance.k);
    let mut record = RunRecord::new(
        Problem::Caching,
        Rational::from(alg.cost()),
        Rational::from(opt),
    )
    .with_meta("pipeline", alg.name())
    .with_meta("k", instance.k);
    record.switches = stream.switches() as u64;
    record.mistakes = Rational::from(stream.mistakes());
    record.seed = seed;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hedge::HedgePredictor;
    use crate::instance::CacheHypothesisClass;
    use crate::majority::MajorityPredictor;
    use learnaug_core::RngStream;

    #[test]
    fn single_hypothesis_equals_fitf() {
        let reqs = vec![0, 1, 2, 0, 3, 1, 2, 0, 4, 3];
        let inst = CachingInstance::new(5, 2, reqs.clone()).unwrap();
        let class = CacheHypothesisClass::new(vec![reqs], 5).unwrap();
        let rec = serve_with_prediction(&inst, MajorityPredictor::new(class), ServeMode::Realizable, 0).unwrap();
        assert_eq!(rec.objective, rec.opt);
        assert_eq!(rec.switches, 0);
    }

    #[test]
    fn realizable_bound_two_hypotheses() {
        let h0 = vec![0, 1, 2, 0, 1, 2, 3, 0];
        let h1 = vec![0, 1, 2, 3, 3, 2, 1, 0];
        let inst = CachingInstance::new(4, 2, h1.clone()).unwrap();
        let class = CacheHypothesisClass::new(vec![h0, h1], 4).unwrap();
        let rec = serve_with_prediction(&inst, MajorityPredictor::new(class), ServeMode::Realizable, 0).unwrap();
        assert!(rec.switches <= 1);
        assert!(rec.objective <= rec.opt + Rational::from(2 * rec.switches));
    }

    #[test]
    fn realizable_mode_rejects_unpredicted_input() {
        let inst = CachingInstance::new(3, 1, vec![0, 2, 1]).unwrap();
        let class = CacheHypothesisClass::new(vec![vec![0, 1, 1]], 3).unwrap();
        let err = serve_with_prediction(&inst, MajorityPredictor::new(class), ServeMode::Realizable, 0);
        assert_eq!(err.unwrap_err(), CachingError::Exhausted);
    }

    #[test]
    fn agnostic_pays_for_mistakes() {
        let inst = CachingInstance::new(4, 2, vec![0, 1, 3, 0, 1, 0]).unwrap();
        let class = CacheHypothesisClass::new(vec![vec![0, 1, 2, 0, 1, 0]], 4).unwrap();
        let rec = serve_with_prediction(&inst, MajorityPredictor::new(class), ServeMode::Agnostic, 0).unwrap();
        assert_eq!(rec.mistakes, Rational::from(1u64));
        let bound = rec.opt + Rational::from(4u64) * rec.mistakes + Rational::from(2 * rec.switches);
        assert!(rec.objective <= bound);
    }

    #[test]
    fn hedge_agnostic_bound_per_run() {
        let base: Vec<PageId> = (0..60).map(|t| (t * 7 + t / 5) % 6).collect();
        let mut other = base.clone();
        for t in (3..60).step_by(9) {
            other[t] = (other[t] + 1) % 6;
        }
        let mut truth = base.clone();
        truth[10] = 5;
        truth[40] = 0;
        let class = CacheHypothesisClass::new(vec![other, base], 6).unwrap();
        let inst = CachingInstance::new(6, 3, truth).unwrap();
        for seed in 0..20 {
            let p = HedgePredictor::new(class.clone(), 3, RngStream::new(seed, 1));
            let rec = serve_with_prediction(&inst, p, ServeMode::Agnostic, seed).unwrap();
            let bound = rec.opt + Rational::from(4u64) * rec.mistakes + Rational::from(3 * rec.switches);
            assert!(rec.objective <= bound, "seed {seed}");
        }
    }
}
