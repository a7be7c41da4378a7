//! Robustification: bound any caching algorithm by a worst-case fallback.
//!
//! Time is cut into intervals in which the offline optimum of the revealed
//! prefix grows by `2^i k`. Inside interval `i` the inner algorithm is followed
//! until it has paid `2^i k log2 k` in that interval, then the fallback takes
//! over until the interval ends. Both algorithms run as shadows on the whole
//! input; the actual cache copies whichever one is active, so each handoff
//! costs at most `k` loads.

use std::collections::BTreeSet;

use learnaug_core::{Problem, Rational, RunRecord};

use crate::error::CachingError;
use crate::fitf::fitf_cost;
use crate::instance::{CachingInstance, PageId};
use crate::policy::{CachePolicy, CacheTracker};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Active {
    Inner,
    Fallback,
}

pub struct RobustCache<'a> {
    k: usize,
    inner: Box<dyn CachePolicy + 'a>,
    fallback: Box<dyn CachePolicy + 'a>,
    tracker: CacheTracker,
    active: Active,
    history: Vec<PageId>,
    interval: u32,
    /// Offline optimum of the prefix at the start of the current interval.
    opt_at_start: u64,
    inner_at_start: u64,
    handoffs: u64,
}

impl<'a> RobustCache<'a> {
    pub fn new(k: usize, inner: Box<dyn CachePolicy + 'a>, fallback: Box<dyn CachePolicy + 'a>) -> Self {
        RobustCache {
            k,
            inner,
            fallback,
            tracker: CacheTracker::new(),
            active: Active::Inner,
            history: Vec::new(),
            interval: 0,
            opt_at_start: 0,
            inner_at_start: 0,
            handoffs: 0,
        }
    }

    pub fn handoffs(&self) -> u64 {
        self.handoffs
    }

    /// Index of the current interval (0-based).
    pub fn interval(&self) -> u32 {
        self.interval
    }

    fn budget(&self) -> u64 {
        (1u64 << self.interval.min(62)) * self.k as u64
    }

    fn inner_threshold(&self) -> f64 {
        self.budget() as f64 * (self.k as f64).log2()
    }

    fn set_active(&mut self, next: Active) {
        if self.active != next {
            self.active = next;
            self.handoffs += 1;
        }
    }
}

impl CachePolicy for RobustCache<'_> {
    fn name(&self) -> &str {
        "robust"
    }

    fn serve(&mut self, t: usize, page: PageId) -> Result<u64, CachingError> {
        let inner_spent = self.inner.cost() - self.inner_at_start;
        if self.active == Active::Inner && inner_spent as f64 >= self.inner_threshold() {
            self.set_active(Active::Fallback);
        }
        self.inner.serve(t, page)?;
        self.fallback.serve(t, page)?;
        let target = match self.active {
            Active::Inner => self.inner.cache(),
            Active::Fallback => self.fallback.cache(),
        };
        let loads = self.tracker.move_to(target);

        self.history.push(page);
        let opt = fitf_cost(&self.history, self.k);
        if opt - self.opt_at_start >= self.budget() {
            self.interval += 1;
            self.opt_at_start = opt;
            self.inner_at_start = self.inner.cost();
            self.set_active(Active::Inner);
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

/// Runs `inner` with `fallback` as worst-case guard over `instance`.
pub fn robustify_cache<'a>(
    inner: Box<dyn CachePolicy + 'a>,
    fallback: Box<dyn CachePolicy + 'a>,
    instance: &CachingInstance,
) -> Result<RunRecord, CachingError> {
    let mut alg = RobustCache::new(instance.k, inner, fallback);
    for (t, &r) in instance.requests.iter().enumerate() {
        alg.serve(t, r)?;
    }
    let inner_cost = alg.inner.cost();
    Ok(RunRecord::new(
        Problem::Caching,
        Rational::from(alg.cost()),
        Rational::from(fitf_cost(&instance.requests, instance.k)),
    )
    .with_meta("pipeline", "robust")
    .with_meta("handoffs", alg.handoffs())
    .with_meta("intervals", alg.interval() + 1)
    .with_meta("inner_cost", inner_cost))
}
