//! The online contract every caching algorithm in this crate fulfils, plus a
//! few classical baselines used by the adversaries and tests.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::CachingError;
use crate::instance::PageId;

/// An online caching algorithm: receives one request at a time and keeps `r_t`
/// in its cache afterwards.
pub trait CachePolicy {
    fn name(&self) -> &str;

    /// Serves request `t` (0-based) and returns the loads it paid.
    fn serve(&mut self, t: usize, page: PageId) -> Result<u64, CachingError>;

    fn cache(&self) -> &BTreeSet<PageId>;

    fn cost(&self) -> u64;
}

/// Actual cache content plus load counter. Moving to a target set pays one
/// load per page that is not already cached.
#[derive(Clone, Debug, Default)]
pub struct CacheTracker {
    pages: BTreeSet<PageId>,
    cost: u64,
}

impl CacheTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pages(&self) -> &BTreeSet<PageId> {
        &self.pages
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn contains(&self, page: PageId) -> bool {
        self.pages.contains(&page)
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }

    /// Replaces the content with `target`, paying `|target \ current|`.
    pub fn move_to<'a>(&mut self, target: impl IntoIterator<Item = &'a PageId>) -> u64 {
        let next: BTreeSet<PageId> = target.into_iter().copied().collect();
        let loads = next.difference(&self.pages).count() as u64;
        self.pages = next;
        self.cost += loads;
        loads
    }

    pub fn load(&mut self, page: PageId) -> u64 {
        if self.pages.insert(page) {
            self.cost += 1;
            1
        } else {
            0
        }
    }

    pub fn evict(&mut self, page: PageId) -> bool {
        self.pages.remove(&page)
    }
}

/// Least-recently-used eviction.
#[derive(Clone, Debug)]
pub struct Lru {
    k: usize,
    tracker: CacheTracker,
    last_use: BTreeMap<PageId, usize>,
}

impl Lru {
    pub fn new(k: usize) -> Self {
        Lru {
            k,
            tracker: CacheTracker::new(),
            last_use: BTreeMap::new(),
        }
    }
}

impl CachePolicy for Lru {
    fn name(&self) -> &str {
        "lru"
    }

    fn serve(&mut self, t: usize, page: PageId) -> Result<u64, CachingError> {
        let mut loads = 0;
        if !self.tracker.contains(page) {
            if self.tracker.len() >= self.k {
                let victim = *self
                    .tracker
                    .pages()
                    .iter()
                    .min_by_key(|p| (self.last_use[p], **p))
                    .expect("full cache");
                self.tracker.evict(victim);
            }
            loads = self.tracker.load(page);
        }
        self.last_use.insert(page, t);
        Ok(loads)
    }

    fn cache(&self) -> &BTreeSet<PageId> {
        self.tracker.pages()
    }

    fn cost(&self) -> u64 {
        self.tracker.cost()
    }
}

/// Deliberately bad clairvoyant policy: on a fault it evicts the cached page
/// whose next request comes soonest. Used to exercise robustification.
#[derive(Clone, Debug)]
pub struct EvictSoonest {
    k: usize,
    requests: Vec<PageId>,
    tracker: CacheTracker,
}

impl EvictSoonest {
    pub fn new(k: usize, requests: Vec<PageId>) -> Self {
        EvictSoonest {
            k,
            requests,
            tracker: CacheTracker::new(),
        }
    }

    fn next_use(&self, page: PageId, after: usize) -> usize {
        self.requests[after + 1..]
            .iter()
            .position(|&p| p == page)
            .map_or(usize::MAX, |d| after + 1 + d)
    }
}

impl CachePolicy for EvictSoonest {
    fn name(&self) -> &str {
        "evict-soonest"
    }

    fn serve(&mut self, t: usize, page: PageId) -> Result<u64, CachingError> {
        if self.tracker.contains(page) {
            return Ok(0);
        }
        if self.tracker.len() >= self.k {
            let victim = *self
                .tracker
                .pages()
                .iter()
                .min_by_key(|&&p| (self.next_use(p, t), p))
                .expect("full cache");
            self.tracker.evict(victim);
        }
        Ok(self.tracker.load(page))
    }

    fn cache(&self) -> &BTreeSet<PageId> {
        self.tracker.pages()
    }

    fn cost(&self) -> u64 {
        self.tracker.cost()
    }
}

/// Serves a whole sequence with `policy`, returning its total cost.
pub fn run_policy(policy: &mut dyn CachePolicy, requests: &[PageId]) -> Result<u64, CachingError> {
    for (t, &p) in requests.iter().enumerate() {
        policy.serve(t, p)?;
        debug_assert!(policy.cache().contains(&p));
    }
    Ok(policy.cost())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_counts_new_pages() {
        let mut t = CacheTracker::new();
        assert_eq!(t.move_to(&[1, 2]), 2);
        assert_eq!(t.move_to(&[2, 3]), 1);
        assert_eq!(t.cost(), 3);
        assert_eq!(t.load(3), 0);
    }

    #[test]
    fn lru_cycle_faults_every_step() {
        let reqs: Vec<PageId> = (0..12).map(|i| i % 3).collect();
        let mut lru = Lru::new(2);
        assert_eq!(run_policy(&mut lru, &reqs).unwrap(), 12);
    }

    #[test]
    fn lru_keeps_recent() {
        let mut lru = Lru::new(2);
        run_policy(&mut lru, &[0, 1, 0, 2]).unwrap();
        assert_eq!(lru.cache().iter().copied().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn evict_soonest_is_bad() {
        let reqs: Vec<PageId> = (0..12).map(|i| i % 3).collect();
        let mut bad = EvictSoonest::new(2, reqs.clone());
        let cost = run_policy(&mut bad, &reqs).unwrap();
        assert!(cost >= 11);
    }
}
