//! Exact event-driven single-machine simulator.
//!
//! A policy is consulted at time 0, at every completion and whenever a job it
//! watches reaches a processed amount it asked to be woken at. Between two
//! such decision points the machine runs the requested jobs at constant
//! rates (summing to at most 1). Policies only see processed amounts and
//! completions, never the true lengths.

use learnaug_core::Rational;

use crate::error::SchedError;
use crate::model::SchedInstance;

/// What a policy observes at a decision point.
#[derive(Clone, Copy, Debug)]
pub struct SimView<'a> {
    pub clock: Rational,
    /// `x_j`: time job `j` has been processed.
    pub processed: &'a [Rational],
    /// Completion time of each finished job.
    pub completion: &'a [Option<Rational>],
}

impl SimView<'_> {
    pub fn is_finished(&self, j: usize) -> bool {
        self.completion[j].is_some()
    }

    pub fn unfinished(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.completion.len()).filter(|&j| self.completion[j].is_none())
    }

    pub fn jobs(&self) -> usize {
        self.completion.len()
    }
}

/// Rates until the next decision point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decision {
    pub rates: Vec<(usize, Rational)>,
    /// Wake up when job `j` reaches processed amount `x` (if it runs).
    pub watch: Vec<(usize, Rational)>,
}

impl Decision {
    /// Runs one job at full speed.
    pub fn run(job: usize) -> Self {
        Decision {
            rates: vec![(job, Rational::ONE)],
            watch: Vec::new(),
        }
    }

    pub fn watching(mut self, job: usize, at: Rational) -> Self {
        self.watch.push((job, at));
        self
    }
}

pub trait SchedPolicy {
    fn decide(&mut self, view: &SimView<'_>) -> Result<Decision, SchedError>;

    /// Prediction switches made so far (0 for prediction-free policies).
    fn switches(&self) -> usize {
        0
    }
}

/// Final state of a simulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimState {
    pub processed: Vec<Rational>,
    pub completion: Vec<Rational>,
    pub clock: Rational,
    /// Jobs in completion order.
    pub completion_order: Vec<usize>,
    /// Times a running job was set aside unfinished.
    pub preemptions: u64,
    pub decisions: u64,
}

impl SimState {
    pub fn total_completion(&self) -> Rational {
        self.completion.iter().sum()
    }
}

pub fn simulate(instance: &SchedInstance, policy: &mut dyn SchedPolicy) -> Result<SimState, SchedError> {
    let n = instance.len();
    let p = &instance.lengths;
    let mut processed = vec![Rational::ZERO; n];
    let mut completion: Vec<Option<Rational>> = vec![None; n];
    let mut clock = Rational::ZERO;
    let mut order = Vec::with_capacity(n);
    let mut preemptions = 0u64;
    let mut decisions = 0u64;
    let mut running: Vec<usize> = Vec::new();
    while order.len() < n {
        let view = SimView {
            clock,
            processed: &processed,
            completion: &completion,
        };
        let decision = policy.decide(&view)?;
        decisions += 1;
        let mut total = Rational::ZERO;
        for &(j, r) in &decision.rates {
            if j >= n || completion[j].is_some() {
                return Err(SchedError::CompletedJob(j));
            }
            if !r.is_positive() {
                return Err(SchedError::InvalidRates(format!("job {j} at rate {r}")));
            }
            total = total.checked_add(r)?;
        }
        if decision.rates.is_empty() || total > Rational::ONE {
            return Err(SchedError::InvalidRates(format!("total rate {total}")));
        }
        preemptions += running
            .iter()
            .filter(|&&j| completion[j].is_none() && !decision.rates.iter().any(|&(k, _)| k == j))
            .count() as u64;
        running = decision.rates.iter().map(|&(j, _)| j).collect();

        let mut dt: Option<Rational> = None;
        let mut consider = |d: Rational| {
            if dt.map_or(true, |cur| d < cur) {
                dt = Some(d);
            }
        };
        for &(j, r) in &decision.rates {
            consider(p[j].checked_sub(processed[j])?.checked_div(r)?);
            for &(w, at) in &decision.watch {
                if w == j && at > processed[j] && at < p[j] {
                    consider(at.checked_sub(processed[j])?.checked_div(r)?);
                }
            }
        }
        let dt = dt.expect("non-empty rates");
        clock = clock.checked_add(dt)?;
        let mut finished: Vec<usize> = Vec::new();
        for &(j, r) in &decision.rates {
            processed[j] = processed[j].checked_add(r.checked_mul(dt)?)?;
            if processed[j] >= p[j] {
                processed[j] = p[j];
                finished.push(j);
            }
        }
        finished.sort_unstable();
        for j in finished {
            completion[j] = Some(clock);
            order.push(j);
        }
    }
    Ok(SimState {
        processed,
        completion: completion.into_iter().map(|c| c.expect("all finished")).collect(),
        clock,
        completion_order: order,
        preemptions,
        decisions,
    })
}

/// Runs jobs to completion in a fixed order.
#[derive(Clone, Debug)]
pub struct FixedOrder {
    order: Vec<usize>,
}

impl FixedOrder {
    pub fn new(order: Vec<usize>) -> Self {
        FixedOrder { order }
    }
}

impl SchedPolicy for FixedOrder {
    fn decide(&mut self, view: &SimView<'_>) -> Result<Decision, SchedError> {
        let j = self
            .order
            .iter()
            .copied()
            .find(|&j| !view.is_finished(j))
            .ok_or(SchedError::InvalidRates("order exhausted".into()))?;
        Ok(Decision::run(j))
    }
}

/// Equal rates for every unfinished job.
#[derive(Clone, Debug, Default)]
pub struct RoundRobin;

impl RoundRobin {
    fn rates(view: &SimView<'_>, share: Rational) -> Result<Vec<(usize, Rational)>, SchedError> {
        let u: Vec<usize> = view.unfinished().collect();
        let each = share.checked_div(Rational::from(u.len()))?;
        Ok(u.into_iter().map(|j| (j, each)).collect())
    }
}

impl SchedPolicy for RoundRobin {
    fn decide(&mut self, view: &SimView<'_>) -> Result<Decision, SchedError> {
        Ok(Decision {
            rates: RoundRobin::rates(view, Rational::ONE)?,
            watch: Vec::new(),
        })
    }
}

/// Shares the machine: the inner policy at speed `1 − δ`, Round-Robin at
/// speed `δ`. A job's progress is the sum of both contributions.
pub struct SpeedSplit<P> {
    inner: P,
    delta: Rational,
}

impl<P: SchedPolicy> SpeedSplit<P> {
    pub fn new(inner: P, delta: Rational) -> Result<Self, SchedError> {
        if !delta.is_positive() || delta >= Rational::ONE {
            return Err(SchedError::InvalidSpeed(delta.to_string()));
        }
        Ok(SpeedSplit { inner, delta })
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: SchedPolicy> SchedPolicy for SpeedSplit<P> {
    fn decide(&mut self, view: &SimView<'_>) -> Result<Decision, SchedError> {
        let inner = self.inner.decide(view)?;
        let mut rates = RoundRobin::rates(view, self.delta)?;
        let scale = Rational::ONE.checked_sub(self.delta)?;
        for (j, r) in inner.rates {
            let slot = rates
                .iter_mut()
                .find(|(k, _)| *k == j)
                .ok_or(SchedError::CompletedJob(j))?;
            slot.1 = slot.1.checked_add(r.checked_mul(scale)?)?;
        }
        Ok(Decision {
            rates,
            watch: inner.watch,
        })
    }

    fn switches(&self) -> usize {
        self.inner.switches()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(ps: &[(i128, i128)]) -> SchedInstance {
        SchedInstance::new(ps.iter().map(|&(a, b)| Rational::frac(a, b)).collect()).unwrap()
    }

    #[test]
    fn index_order() {
        let s = simulate(&inst(&[(1, 5), (1, 2)]), &mut FixedOrder::new(vec![0, 1])).unwrap();
        assert_eq!(s.completion, vec![Rational::frac(1, 5), Rational::frac(7, 10)]);
        assert_eq!(s.total_completion(), Rational::frac(9, 10));
        assert_eq!(s.preemptions, 0);
    }

    #[test]
    fn round_robin_two_phases() {
        let s = simulate(&inst(&[(1, 2), (1, 1)]), &mut RoundRobin).unwrap();
        assert_eq!(s.completion, vec![Rational::ONE, Rational::frac(3, 2)]);
        assert_eq!(s.total_completion(), Rational::frac(5, 2));
    }

    #[test]
    fn single_job_any_policy() {
        let i = inst(&[(3, 7)]);
        for s in [
            simulate(&i, &mut RoundRobin).unwrap(),
            simulate(&i, &mut FixedOrder::new(vec![0])).unwrap(),
            simulate(&i, &mut SpeedSplit::new(FixedOrder::new(vec![0]), Rational::frac(1, 3)).unwrap()).unwrap(),
        ] {
            assert_eq!(s.total_completion(), Rational::frac(3, 7));
        }
    }

    #[test]
    fn equal_jobs_round_robin() {
        let s = simulate(&inst(&[(1, 4); 5]), &mut RoundRobin).unwrap();
        assert!(s.completion.iter().all(|&c| c == Rational::frac(5, 4)));
        assert_eq!(s.total_completion(), Rational::frac(25, 4));
    }

    #[test]
    fn finished_job_is_rejected() {
        struct Stubborn;
        impl SchedPolicy for Stubborn {
            fn decide(&mut self, _: &SimView<'_>) -> Result<Decision, SchedError> {
                Ok(Decision::run(0))
            }
        }
        assert_eq!(simulate(&inst(&[(1, 2), (1, 2)]), &mut Stubborn), Err(SchedError::CompletedJob(0)));
    }

    #[test]
    fn speed_split_with_sjf() {
        let i = inst(&[(1, 2), (1, 1)]);
        let mut pol = SpeedSplit::new(FixedOrder::new(vec![0, 1]), Rational::frac(1, 2)).unwrap();
        let s = simulate(&i, &mut pol).unwrap();
        // job 0 at rate 3/4 until 2/3; then job 1 alone
        assert_eq!(s.completion[0], Rational::frac(2, 3));
        assert_eq!(s.completion[1], Rational::frac(3, 2));
        assert!(s.total_completion() <= Rational::from(2u64) * Rational::from(2u64) * Rational::from(2u64));
    }
}
