//! Three-length adversary against deterministic integer-step policies.
//!
//! The first `ℓ²` jobs form `ℓ` blocks of `ℓ` jobs; hypothesis `i` gives its
//! own block length 1 and every other block length 3, and all remaining jobs
//! length 2. Instead of drawing the true hypothesis up front, the adversary
//! answers adaptively: the first time the policy touches a still-open block
//! that block is declared long, unless it is the last open block, which then
//! becomes the short one. Lengths are reported divided by 3 so every job is
//! at most 1.

use learnaug_core::{Problem, Rational, RngStream, RunRecord};

use crate::error::SchedError;
use crate::model::{sjf_opt, SchedClass, SchedInstance};

/// What an integer-step policy observes before choosing the next unit.
#[derive(Clone, Copy, Debug)]
pub struct UnitView<'a> {
    pub time: u64,
    /// Units processed per job.
    pub processed: &'a [u64],
    pub finished: &'a [bool],
}

/// Picks the unfinished job that receives the next unit of processing.
pub trait UnitPolicy {
    fn pick(&mut self, view: &UnitView<'_>) -> usize;
}

/// Always the unfinished job with the smallest index.
#[derive(Clone, Copy, Debug, Default)]
pub struct IndexOrder;

impl UnitPolicy for IndexOrder {
    fn pick(&mut self, view: &UnitView<'_>) -> usize {
        view.finished.iter().position(|f| !f).expect("unfinished job")
    }
}

/// Always the first unfinished job of an order drawn once at construction.
#[derive(Clone, Debug)]
pub struct RandomOrder {
    order: Vec<usize>,
}

impl RandomOrder {
    pub fn new(n: usize, rng: &mut RngStream) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);
        RandomOrder { order }
    }
}

impl UnitPolicy for RandomOrder {
    fn pick(&mut self, view: &UnitView<'_>) -> usize {
        *self.order.iter().find(|&&j| !view.finished[j]).expect("unfinished job")
    }
}

/// Integer lengths (before dividing by 3) of the class's `i`-th hypothesis.
fn hypothesis_units(ell: usize, n: usize, i: usize) -> Vec<u64> {
    (0..n)
        .map(|j| {
            if j < ell * ell {
                if j / ell == i {
                    1
                } else {
                    3
                }
            } else {
                2
            }
        })
        .collect()
}

/// The hypothesis class the adversary plays against (lengths divided by 3).
pub fn three_length_class(ell: usize, n: usize) -> Result<SchedClass, SchedError> {
    check(ell, n)?;
    let hyps = (0..ell)
        .map(|i| hypothesis_units(ell, n, i).into_iter().map(|u| Rational::frac(u as i128, 3)).collect())
        .collect();
    SchedClass::lengths(hyps, n)
}

fn check(ell: usize, n: usize) -> Result<(), SchedError> {
    if ell < 2 {
        return Err(SchedError::TooFewHypotheses);
    }
    if n < 2 * ell * ell {
        return Err(SchedError::TooFewJobs { n, need: 2 * ell * ell });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct ThreeLengthOutcome {
    pub record: RunRecord,
    /// Index of the hypothesis that turned out true.
    pub chosen: usize,
    pub instance: SchedInstance,
    /// Jobs in completion order.
    pub completion_order: Vec<usize>,
}

impl ThreeLengthOutcome {
    pub fn regret(&self) -> Rational {
        self.record.regret()
    }
}

/// The regret every deterministic policy is forced to, `ℓn/16`.
pub fn three_length_bound(ell: usize, n: usize) -> Rational {
    Rational::frac((ell * n) as i128, 16)
}

pub fn three_length_adversary(ell: usize, n: usize, policy: &mut dyn UnitPolicy) -> Result<ThreeLengthOutcome, SchedError> {
    check(ell, n)?;
    let mut length: Vec<Option<u64>> = (0..n).map(|j| (j >= ell * ell).then_some(2)).collect();
    let mut open: Vec<usize> = (0..ell).collect();
    let mut processed = vec![0u64; n];
    let mut finished = vec![false; n];
    let mut completion = vec![0u64; n];
    let mut order = Vec::with_capacity(n);
    let mut time = 0u64;
    while order.len() < n {
        let j = policy.pick(&UnitView {
            time,
            processed: &processed,
            finished: &finished,
        });
        if j >= n || finished[j] {
            return Err(SchedError::CompletedJob(j));
        }
        if length[j].is_none() {
            let block = j / ell;
            let short = open.len() == 1;
            open.retain(|&b| b != block);
            for k in block * ell..(block + 1) * ell {
                length[k] = Some(if short { 1 } else { 3 });
            }
        }
        processed[j] += 1;
        time += 1;
        if Some(processed[j]) == length[j] {
            finished[j] = true;
            completion[j] = time;
            order.push(j);
        }
    }
    let chosen = (0..ell)
        .find(|&b| length[b * ell] != Some(3))
        .expect("one block is short");
    debug_assert!(length.iter().all(Option::is_some));
    let instance = SchedInstance::new(
        hypothesis_units(ell, n, chosen)
            .into_iter()
            .map(|u| Rational::frac(u as i128, 3))
            .collect(),
    )?;
    let objective: Rational = completion.iter().map(|&c| Rational::frac(c as i128, 3)).sum();
    let (opt, _) = sjf_opt(&instance);
    let record = RunRecord::new(Problem::Sched, objective, opt)
        .with_meta("pipeline", "three_length_adversary")
        .with_meta("chosen", chosen);
    Ok(ThreeLengthOutcome {
        record,
        chosen,
        instance,
        completion_order: order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_order_example() {
        let out = three_length_adversary(2, 8, &mut IndexOrder).unwrap();
        assert_eq!(out.chosen, 1);
        // completions 3,6,7,8,10,12,14,16 against 1,2,4,6,8,10,13,16
        assert_eq!(out.record.objective, Rational::frac(76, 3));
        assert_eq!(out.record.opt, Rational::frac(60, 3));
        assert!(out.regret() >= three_length_bound(2, 8));
    }

    #[test]
    fn opt_order_is_short_medium_long() {
        let class = three_length_class(3, 18).unwrap();
        let SchedClass::Lengths(h) = class else { unreachable!() };
        let inst = SchedInstance::new(h[0].clone()).unwrap();
        let (_, order) = sjf_opt(&inst);
        let units: Vec<i128> = order.iter().map(|&j| (inst.lengths[j] * Rational::from(3u64)).numer()).collect();
        let expected: Vec<i128> = [vec![1; 3], vec![2; 9], vec![3; 6]].concat();
        assert_eq!(units, expected);
    }

    #[test]
    fn precondition() {
        assert!(matches!(three_length_adversary(1, 8, &mut IndexOrder), Err(SchedError::TooFewHypotheses)));
        assert!(matches!(three_length_adversary(2, 7, &mut IndexOrder), Err(SchedError::TooFewJobs { .. })));
    }

    #[test]
    fn random_orders_pay() {
        for seed in 0..50 {
            let mut pol = RandomOrder::new(8, &mut RngStream::new(seed, 0));
            let out = three_length_adversary(2, 8, &mut pol).unwrap();
            assert!(out.regret() >= three_length_bound(2, 8));
        }
    }
}
