//! Instances whose jobs have length `λ` or 1: a per-job majority vote over
//! the consistent hypotheses, with short-predicted jobs run first and
//! long-predicted jobs in random order.

use learnaug_core::{Problem, Rational, RngStream, RunRecord};

use crate::error::SchedError;
use crate::model::{check_lambda, sjf_opt, SchedClass, SchedInstance};
use crate::realizable::SchedRun;
use crate::sim::{simulate, Decision, SchedPolicy, SimView};

/// Majority predictor plus the run-to-completion rule.
#[derive(Clone, Debug)]
pub struct TwoLengthPolicy {
    hypotheses: Vec<Vec<Rational>>,
    lambda: Rational,
    active: Vec<usize>,
    prediction: Vec<Rational>,
    seen: Vec<bool>,
    switches: usize,
    started: bool,
    rng: RngStream,
}

impl TwoLengthPolicy {
    pub fn new(hypotheses: Vec<Vec<Rational>>, lambda: Rational, rng: RngStream) -> Result<Self, SchedError> {
        check_lambda(lambda)?;
        let n = hypotheses.first().map_or(0, Vec::len);
        Ok(TwoLengthPolicy {
            active: (0..hypotheses.len()).collect(),
            hypotheses,
            lambda,
            prediction: vec![Rational::ONE; n],
            seen: vec![false; n],
            switches: 0,
            started: false,
            rng,
        })
    }

    fn recompute(&mut self, view: &SimView<'_>) -> Result<(), SchedError> {
        let hyps = &self.hypotheses;
        self.active
            .retain(|&i| (0..view.jobs()).all(|j| !view.is_finished(j) || hyps[i][j] == view.processed[j]));
        if self.active.is_empty() {
            return Err(SchedError::Exhausted);
        }
        for j in view.unfinished() {
            let short = self.active.iter().filter(|&&i| self.hypotheses[i][j] == self.lambda).count();
            // ties go to the short length
            self.prediction[j] = if 2 * short >= self.active.len() {
                self.lambda
            } else {
                Rational::ONE
            };
        }
        Ok(())
    }

    pub fn switches(&self) -> usize {
        self.switches
    }
}

impl SchedPolicy for TwoLengthPolicy {
    fn decide(&mut self, view: &SimView<'_>) -> Result<Decision, SchedError> {
        let mut wrong = false;
        for j in 0..view.jobs() {
            if view.is_finished(j) && !self.seen[j] {
                self.seen[j] = true;
                wrong |= view.processed[j] != self.prediction[j];
            }
        }
        if !self.started {
            self.recompute(view)?;
            self.started = true;
        } else if wrong {
            self.recompute(view)?;
            self.switches += 1;
        }
        if let Some(j) = view.unfinished().find(|&j| self.prediction[j] == self.lambda) {
            return Ok(Decision::run(j));
        }
        let unfinished: Vec<usize> = view.unfinished().collect();
        let j = unfinished[self.rng.uniform_index(unfinished.len())?];
        Ok(Decision::run(j))
    }

    fn switches(&self) -> usize {
        self.switches
    }
}

pub fn two_length_run(instance: &SchedInstance, class: &SchedClass, lambda: Rational, rng: RngStream) -> Result<SchedRun, SchedError> {
    SchedInstance::two_length(instance.lengths.clone(), lambda)?;
    let SchedClass::Lengths(hyps) = class else {
        return Err(SchedError::Format("two_length_run needs length hypotheses".into()));
    };
    let seed = rng.seed();
    let mut policy = TwoLengthPolicy::new(hyps.clone(), lambda, rng)?;
    let sim = simulate(instance, &mut policy)?;
    let (opt, _) = sjf_opt(instance);
    let switches = policy.switches();
    let mut record = RunRecord::new(Problem::Sched, sim.total_completion(), opt)
        .with_meta("pipeline", "two_length")
        .with_meta("sigma", switches)
        .with_meta("preemptions", sim.preemptions)
        .with_meta("lambda", lambda);
    record.switches = switches as u64;
    record.seed = seed;
    Ok(SchedRun { record, sim, switches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lengths(bits: &[u8], lambda: Rational) -> Vec<Rational> {
        bits.iter().map(|&b| if b == 1 { Rational::ONE } else { lambda }).collect()
    }

    #[test]
    fn correct_predictions_cost_opt() {
        let lambda = Rational::frac(1, 4);
        let truth = lengths(&[1, 0, 1, 0, 0, 1], lambda);
        let class = SchedClass::lengths(vec![truth.clone()], 6).unwrap();
        for seed in 0..10 {
            let inst = SchedInstance::two_length(truth.clone(), lambda).unwrap();
            let run = two_length_run(&inst, &class, lambda, RngStream::new(seed, 0)).unwrap();
            assert_eq!(run.record.regret(), Rational::ZERO);
            assert_eq!(run.switches, 0);
        }
    }

    #[test]
    fn zero_length_jobs_finish_instantly() {
        let lambda = Rational::ZERO;
        let truth = lengths(&[1, 0, 0], lambda);
        let class = SchedClass::lengths(vec![truth.clone()], 3).unwrap();
        let inst = SchedInstance::two_length(truth, lambda).unwrap();
        let run = two_length_run(&inst, &class, lambda, RngStream::new(0, 0)).unwrap();
        assert_eq!(run.sim.completion, vec![Rational::ONE, Rational::ZERO, Rational::ZERO]);
    }

    #[test]
    fn switches_at_most_log_ell() {
        let lambda = Rational::frac(1, 2);
        let mut rng = RngStream::new(9, 0);
        for _ in 0..50 {
            let hyps: Vec<Vec<Rational>> = (0..8)
                .map(|_| (0..10).map(|_| if rng.uniform_index(2).unwrap() == 1 { Rational::ONE } else { lambda }).collect())
                .collect();
            let truth = hyps[rng.uniform_index(8).unwrap()].clone();
            let class = SchedClass::lengths(hyps, 10).unwrap();
            let inst = SchedInstance::two_length(truth, lambda).unwrap();
            let run = two_length_run(&inst, &class, lambda, rng.split(1)).unwrap();
            assert!(run.switches <= 3);
        }
    }

    #[test]
    fn rejects_other_lengths() {
        let lambda = Rational::frac(1, 2);
        let inst = SchedInstance::new(vec![Rational::frac(1, 3)]).unwrap();
        let class = SchedClass::lengths(vec![vec![Rational::frac(1, 3)]], 1).unwrap();
        assert!(matches!(
            two_length_run(&inst, &class, lambda, RngStream::new(0, 0)),
            Err(SchedError::NotTwoLength { .. })
        ));
    }
}
