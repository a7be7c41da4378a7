//! Belady's furthest-in-the-future eviction and an exhaustive DP oracle.

use std::collections::BTreeMap;

use crate::error::CachingError;
use crate::instance::{CachingInstance, PageId};

/// Cache contents after serving each request, plus the number of loads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvictionSchedule {
    /// `caches[t]` is the (sorted) cache after serving request `t`.
    pub caches: Vec<Vec<PageId>>,
    /// Loads performed while serving request `t`.
    pub loads: Vec<u32>,
    pub cost: u64,
}

impl EvictionSchedule {
    pub fn cache_at(&self, t: usize) -> &[PageId] {
        &self.caches[t]
    }

    /// Loads paid while serving requests `0..=t`.
    pub fn cost_through(&self, t: usize) -> u64 {
        self.loads[..=t].iter().map(|&l| l as u64).sum()
    }
}

const NEVER: usize = usize::MAX;

fn next_uses(requests: &[PageId]) -> Vec<usize> {
    let mut next = vec![NEVER; requests.len()];
    let mut last_seen: BTreeMap<PageId, usize> = BTreeMap::new();
    for (t, &p) in requests.iter().enumerate().rev() {
        if let Some(&n) = last_seen.get(&p) {
            next[t] = n;
        }
        last_seen.insert(p, t);
    }
    next
}

/// Runs lazy FitF over `requests`, calling `visit` with the cache after each
/// step. Pages never requested again are evicted smallest id first.
fn run_fitf(requests: &[PageId], k: usize, mut visit: impl FnMut(&BTreeMap<PageId, usize>, u32)) -> u64 {
    let next = next_uses(requests);
    // page -> time of its next request
    let mut cache: BTreeMap<PageId, usize> = BTreeMap::new();
    let mut cost = 0u64;
    for (t, &p) in requests.iter().enumerate() {
        let mut loads = 0;
        if let Some(slot) = cache.get_mut(&p) {
            *slot = next[t];
        } else {
            if cache.len() >= k {
                // BTreeMap iterates by ascending id, so `>` keeps the smallest id among ties.
                let mut victim = None;
                let mut furthest = 0usize;
                for (&q, &n) in cache.iter() {
                    if victim.is_none() || n > furthest {
                        victim = Some(q);
                        furthest = n;
                    }
                }
                cache.remove(&victim.expect("full cache has a victim"));
            }
            cache.insert(p, next[t]);
            loads = 1;
            cost += 1;
        }
        visit(&cache, loads);
    }
    cost
}

pub fn fitf_schedule(instance: &CachingInstance) -> EvictionSchedule {
    fitf_on(&instance.requests, instance.k)
}

/// FitF over an arbitrary (possibly predicted) sequence.
pub fn fitf_on(requests: &[PageId], k: usize) -> EvictionSchedule {
    let mut caches = Vec::with_capacity(requests.len());
    let mut loads = Vec::with_capacity(requests.len());
    let cost = run_fitf(requests, k, |cache, l| {
        caches.push(cache.keys().copied().collect());
        loads.push(l);
    });
    EvictionSchedule { caches, loads, cost }
}

/// Cost of FitF without materializing the schedule.
pub fn fitf_cost(requests: &[PageId], k: usize) -> u64 {
    run_fitf(requests, k, |_, _| {})
}

/// Exact minimum number of loads by dynamic programming over every cache
/// content of at most `k` pages. Capped at 6 pages and 12 requests.
pub fn brute_force_opt(instance: &CachingInstance) -> Result<u64, CachingError> {
    let u = instance.universe_size;
    let len = instance.requests.len();
    if u > 6 || len > 12 {
        return Err(CachingError::TooLarge { universe: u, len });
    }
    let states = 1usize << u;
    let feasible: Vec<usize> = (0..states)
        .filter(|m| (*m as u32).count_ones() as usize <= instance.k)
        .collect();
    let mut dp = vec![u64::MAX; states];
    dp[0] = 0;
    for &r in &instance.requests {
        let bit = 1usize << r;
        let mut next = vec![u64::MAX; states];
        for &to in feasible.iter().filter(|&&m| m & bit != 0) {
            for &from in &feasible {
                if dp[from] == u64::MAX {
                    continue;
                }
                let loads = (to & !from).count_ones() as u64;
                next[to] = next[to].min(dp[from] + loads);
            }
        }
        dp = next;
    }
    Ok(dp.into_iter().min().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(k: usize, u: usize, reqs: &[PageId]) -> CachingInstance {
        CachingInstance::new(u, k, reqs.to_vec()).unwrap()
    }

    #[test]
    fn three_distinct_pages() {
        let s = fitf_schedule(&inst(2, 3, &[0, 1, 2, 0]));
        assert_eq!(s.cost, 3);
        // page 1 is never requested again, so it goes at t=2
        assert_eq!(s.cache_at(2), &[0, 2]);
    }

    #[test]
    fn refault_instance() {
        assert_eq!(fitf_schedule(&inst(2, 3, &[0, 1, 2, 0, 1])).cost, 4);
        assert_eq!(brute_force_opt(&inst(2, 3, &[0, 1, 2, 0, 1])).unwrap(), 4);
    }

    #[test]
    fn repeated_page() {
        assert_eq!(fitf_schedule(&inst(3, 1, &[0, 0, 0])).cost, 1);
    }

    #[test]
    fn brute_force_small_cases() {
        assert_eq!(brute_force_opt(&inst(1, 2, &[0, 1, 0, 1])).unwrap(), 4);
        assert_eq!(brute_force_opt(&inst(2, 2, &[])).unwrap(), 0);
        assert!(matches!(
            brute_force_opt(&inst(2, 7, &[0])),
            Err(CachingError::TooLarge { .. })
        ));
        assert!(brute_force_opt(&inst(2, 3, &[0; 13])).is_err());
    }

    #[test]
    fn never_again_ties_evict_smallest_id() {
        // 0 is dead at t=2 while 1 returns at t=3.
        let s = fitf_schedule(&inst(2, 3, &[1, 0, 2, 1]));
        assert_eq!(s.cache_at(2), &[1, 2]);
        // both dead: the smaller id goes
        let s = fitf_schedule(&inst(2, 3, &[0, 1, 2]));
        assert_eq!(s.cache_at(2), &[1, 2]);
    }

    #[test]
    fn schedule_invariants() {
        let reqs = [0, 1, 2, 3, 0, 1, 4, 0, 2, 3, 4, 1];
        let s = fitf_schedule(&inst(3, 5, &reqs));
        let mut prev: Vec<PageId> = vec![];
        let mut total = 0;
        for (t, &r) in reqs.iter().enumerate() {
            let x = s.cache_at(t);
            assert!(x.contains(&r));
            assert!(x.len() <= 3);
            total += x.iter().filter(|p| !prev.contains(p)).count() as u64;
            prev = x.to_vec();
        }
        assert_eq!(total, s.cost);
        assert_eq!(s.cost_through(reqs.len() - 1), s.cost);
    }

    proptest! {
        #[test]
        fn fitf_matches_dp(k in 1usize..4, reqs in proptest::collection::vec(0usize..5, 0..12)) {
            let i = inst(k, 5, &reqs);
            prop_assert_eq!(fitf_schedule(&i).cost, brute_force_opt(&i).unwrap());
        }

        #[test]
        fn prefix_cost_is_prefix_fitf(k in 1usize..5, reqs in proptest::collection::vec(0usize..8, 1..40)) {
            let full = fitf_on(&reqs, k);
            for t in 0..reqs.len() {
                prop_assert_eq!(full.cost_through(t), fitf_cost(&reqs[..=t], k));
            }
        }
    }
}
