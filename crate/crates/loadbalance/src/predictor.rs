//! Predictors over scaled hypothesis instances.
//!
//! Both keep the set `A` of instances still consistent with the arrivals and
//! a predicted count table that is never exceeded by the arrivals; when a
//! count would be exceeded they recompute `A` and switch, or report ERR once
//! `A` is empty.

use learnaug_core::{Rational, RngStream};

use crate::model::LbInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LbEvent {
    /// The arrival fits the current prediction.
    Fits,
    /// The prediction was replaced.
    Switched,
    /// No instance is consistent with the input.
    Err,
}

pub trait LbPredictor {
    /// Reacts to an arrival of a type-`p` job; `arrived` already counts it.
    fn on_arrival(&mut self, p: usize, arrived: &[u64]) -> LbEvent;

    fn prediction(&self) -> &LbInstance;

    fn switches(&self) -> usize;

    fn active(&self) -> &[usize];
}

fn consistent(instances: &[LbInstance], arrived: &[u64]) -> Vec<usize> {
    (0..instances.len()).filter(|&i| instances[i].subsumes(arrived)).collect()
}

/// Lower median of `values` (which must be non-empty).
pub fn lower_median(values: &mut [u64]) -> u64 {
    values.sort_unstable();
    values[(values.len() - 1) / 2]
}

/// Predicts, per type, the lower median of the counts over `A`.
#[derive(Clone, Debug)]
pub struct MedianPredictor {
    instances: Vec<LbInstance>,
    active: Vec<usize>,
    prediction: LbInstance,
    switches: usize,
    sizes: Vec<usize>,
}

impl MedianPredictor {
    /// `None` when no instance is consistent with `arrived` already.
    pub fn new(instances: Vec<LbInstance>, arrived: &[u64]) -> Option<Self> {
        let active = consistent(&instances, arrived);
        if active.is_empty() {
            return None;
        }
        let mut p = MedianPredictor {
            instances,
            active,
            prediction: LbInstance::default(),
            switches: 0,
            sizes: Vec::new(),
        };
        p.recompute_medians();
        Some(p)
    }

    fn types(&self) -> usize {
        self.instances.iter().map(|i| i.counts.len()).max().unwrap_or(0)
    }

    fn recompute_medians(&mut self) {
        let counts = (0..self.types())
            .map(|p| {
                let mut v: Vec<u64> = self.active.iter().map(|&i| self.instances[i].get(p)).collect();
                lower_median(&mut v)
            })
            .collect();
        self.prediction = LbInstance::new(counts);
        self.sizes.push(self.active.len());
    }

    /// `|A|` after initialization and after each switch.
    pub fn active_sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of types the current prediction contains.
    pub fn predicted_types(&self) -> usize {
        self.prediction.counts.iter().filter(|&&n| n > 0).count()
    }

    /// The covering schedule from the coverability argument: repeatedly take
    /// the instance of `A` that covers (`n^i_p ≥ ñ_p`) the most uncovered
    /// types and stack its schedule. Returns the stacked makespan and the
    /// instances used. `makespans[i]` is the schedule makespan of instance `i`.
    pub fn cover(&self, makespans: &[Rational]) -> (Rational, Vec<usize>) {
        let mut uncovered: Vec<usize> = (0..self.prediction.counts.len())
            .filter(|&p| self.prediction.counts[p] > 0)
            .collect();
        let mut pool = self.active.clone();
        let mut total = Rational::ZERO;
        let mut picks = Vec::new();
        while !uncovered.is_empty() && !pool.is_empty() {
            let covers = |i: usize| {
                uncovered
                    .iter()
                    .filter(|&&p| self.instances[i].get(p) >= self.prediction.counts[p])
                    .count()
            };
            let (slot, &best) = pool
                .iter()
                .enumerate()
                .max_by(|a, b| covers(*a.1).cmp(&covers(*b.1)).then(b.1.cmp(a.1)))
                .expect("non-empty pool");
            if covers(best) == 0 {
                break;
            }
            uncovered.retain(|&p| self.instances[best].get(p) < self.prediction.counts[p]);
            total += makespans[best];
            picks.push(best);
            pool.remove(slot);
        }
        assert!(uncovered.is_empty(), "every predicted type is covered by half of A");
        (total, picks)
    }
}

impl LbPredictor for MedianPredictor {
    fn on_arrival(&mut self, p: usize, arrived: &[u64]) -> LbEvent {
        if arrived[p] <= self.prediction.get(p) {
            return LbEvent::Fits;
        }
        let instances = &self.instances;
        self.active.retain(|&i| instances[i].subsumes(arrived));
        if self.active.is_empty() {
            return LbEvent::Err;
        }
        self.recompute_medians();
        self.switches += 1;
        LbEvent::Switched
    }

    fn prediction(&self) -> &LbInstance {
        &self.prediction
    }

    fn switches(&self) -> usize {
        self.switches
    }

    fn active(&self) -> &[usize] {
        &self.active
    }
}

/// Predicts a uniformly random consistent instance, redrawing on violation.
#[derive(Clone, Debug)]
pub struct RandomPredictor {
    instances: Vec<LbInstance>,
    active: Vec<usize>,
    current: usize,
    rng: RngStream,
    switches: usize,
}

impl RandomPredictor {
    pub fn new(instances: Vec<LbInstance>, arrived: &[u64], mut rng: RngStream) -> Option<Self> {
        let active = consistent(&instances, arrived);
        if active.is_empty() {
            return None;
        }
        let current = active[rng.uniform_index(active.len()).expect("non-empty")];
        Some(RandomPredictor {
            instances,
            active,
            current,
            rng,
            switches: 0,
        })
    }

    /// Index of the instance currently predicted.
    pub fn current(&self) -> usize {
        self.current
    }
}

impl LbPredictor for RandomPredictor {
    fn on_arrival(&mut self, p: usize, arrived: &[u64]) -> LbEvent {
        if arrived[p] <= self.instances[self.current].get(p) {
            return LbEvent::Fits;
        }
        let instances = &self.instances;
        self.active.retain(|&i| instances[i].subsumes(arrived));
        if self.active.is_empty() {
            return LbEvent::Err;
        }
        self.current = self.active[self.rng.uniform_index(self.active.len()).expect("non-empty")];
        self.switches += 1;
        LbEvent::Switched
    }

    fn prediction(&self) -> &LbInstance {
        &self.instances[self.current]
    }

    fn switches(&self) -> usize {
        self.switches
    }

    fn active(&self) -> &[usize] {
        &self.active
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_type(counts: &[u64]) -> Vec<LbInstance> {
        counts.iter().map(|&n| LbInstance::new(vec![n])).collect()
    }

    fn run(p: &mut dyn LbPredictor, feed: &[usize], types: usize) -> (usize, bool) {
        let mut arrived = vec![0u64; types];
        for &ty in feed {
            arrived[ty] += 1;
            match p.on_arrival(ty, &arrived) {
                LbEvent::Err => return (p.switches(), true),
                _ => assert!(p.prediction().subsumes(&arrived)),
            }
        }
        (p.switches(), false)
    }

    #[test]
    fn medians() {
        assert_eq!(lower_median(&mut [1, 3, 5]), 3);
        assert_eq!(lower_median(&mut [4, 2]), 2);
    }

    #[test]
    fn median_halves_until_err() {
        let inst = single_type(&[1, 2, 3, 4, 5, 6, 7, 8]);
        let mut p = MedianPredictor::new(inst, &[0]).unwrap();
        assert_eq!(p.prediction().counts, vec![4]);
        let (switches, err) = run(&mut p, &[0; 9], 1);
        assert!(err);
        assert!(switches <= 3 + 1);
        for w in p.active_sizes().windows(2) {
            assert!(w[1] <= w[0] / 2);
        }
    }

    #[test]
    fn median_identifies_consistent_instance() {
        let inst = vec![
            LbInstance::new(vec![4, 0]),
            LbInstance::new(vec![0, 4]),
            LbInstance::new(vec![2, 2]),
            LbInstance::new(vec![3, 1]),
        ];
        let mut p = MedianPredictor::new(inst, &[0, 0]).unwrap();
        let (_, err) = run(&mut p, &[1, 1, 1, 1], 2);
        assert!(!err);
        assert_eq!(p.active(), &[1]);
    }

    #[test]
    fn cover_uses_half_covering_instances() {
        let inst = vec![
            LbInstance::new(vec![4, 0, 1]),
            LbInstance::new(vec![0, 4, 1]),
            LbInstance::new(vec![2, 2, 2]),
        ];
        let p = MedianPredictor::new(inst, &[0, 0, 0]).unwrap();
        assert_eq!(p.prediction().counts, vec![2, 2, 1]);
        let (total, picks) = p.cover(&[Rational::ONE, Rational::ONE, Rational::from(3u64)]);
        assert_eq!(picks, vec![2]);
        assert_eq!(total, Rational::from(3u64));
    }

    #[test]
    fn random_single_instance() {
        let mut p = RandomPredictor::new(single_type(&[3]), &[0], RngStream::new(1, 0)).unwrap();
        assert_eq!(run(&mut p, &[0, 0, 0], 1), (0, false));
        let mut p = RandomPredictor::new(single_type(&[3]), &[0], RngStream::new(1, 0)).unwrap();
        assert_eq!(run(&mut p, &[0; 4], 1), (0, true));
    }

    #[test]
    fn random_draws_stay_in_active_set() {
        for seed in 0..50 {
            let mut p = RandomPredictor::new(single_type(&[1, 2, 3, 4, 5, 6, 7, 8]), &[0], RngStream::new(seed, 0)).unwrap();
            let mut arrived = vec![0u64];
            for _ in 0..8 {
                arrived[0] += 1;
                p.on_arrival(0, &arrived);
                assert!(p.active().contains(&p.current()));
            }
        }
    }
}
