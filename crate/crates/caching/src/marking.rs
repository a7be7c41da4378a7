//! Randomized marking, the worst-case fallback used by robustification.

use std::collections::BTreeSet;

use learnaug_core::{Problem, Rational, RngStream, RunRecord};

use crate::error::CachingError;
use crate::fitf::fitf_cost;
use crate::instance::{CachingInstance, PageId};
use crate::policy::{CachePolicy, CacheTracker};

/// On a fault evicts a uniformly random unmarked page; when every cached page
/// is marked a new phase starts and all marks are cleared. Requested pages are
/// marked. `O(log k)`-competitive in expectation.
#[derive(Clone, Debug)]
pub struct RandomizedMarking {
    k: usize,
    tracker: CacheTracker,
    marked: BTreeSet<PageId>,
    rng: RngStream,
    phases: u64,
}

impl RandomizedMarking {
    pub fn new(k: usize, rng: RngStream) -> Self {
        RandomizedMarking {
            k,
            tracker: CacheTracker::new(),
            marked: BTreeSet::new(),
            rng,
            phases: 0,
        }
    }

    /// Number of phases started so far.
    pub fn phases(&self) -> u64 {
        self.phases
    }
}

impl CachePolicy for RandomizedMarking {
    fn name(&self) -> &str {
        "marking"
    }

    fn serve(&mut self, _t: usize, page: PageId) -> Result<u64, CachingError> {
        let mut loads = 0;
        if !self.tracker.contains(page) {
            if self.tracker.len() >= self.k {
                if self.marked.len() >= self.tracker.len() {
                    self.marked.clear();
                    self.phases += 1;
                }
                let unmarked: Vec<PageId> = self
                    .tracker
                    .pages()
                    .iter()
                    .copied()
                    .filter(|p| !self.marked.contains(p))
                    .collect();
                let i = self.rng.uniform_index(unmarked.len()).expect("an unmarked page exists");
                self.tracker.evict(unmarked[i]);
            }
            loads = self.tracker.load(page);
        }
        self.marked.insert(page);
        Ok(loads)
    }

    fn cache(&self) -> &BTreeSet<PageId> {
        self.tracker.pages()
    }

    fn cost(&self) -> u64 {
        self.tracker.cost()
    }
}

pub fn marking_algorithm(instance: &CachingInstance, rng: RngStream) -> RunRecord {
    let seed = rng.seed();
    let mut alg = RandomizedMarking::new(instance.k, rng);
    for (t, &r) in instance.requests.iter().enumerate() {
        alg.serve(t, r).expect("marking never fails");
    }
    let mut record = RunRecord::new(
        Problem::Caching,
        Rational::from(alg.cost()),
        Rational::from(fitf_cost(&instance.requests, instance.k)),
    )
    .with_meta("pipeline", "marking")
    .with_meta("phases", alg.phases());
    record.seed = seed;
    record
}

/// `H_k = 1 + 1/2 + ... + 1/k`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}
