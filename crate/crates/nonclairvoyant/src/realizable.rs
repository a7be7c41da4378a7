//! Realizable length hypotheses: the smallest-consistent-length predictor
//! and shortest-predicted-job-first.

use learnaug_core::{Problem, Rational, RunRecord};

use crate::error::SchedError;
use crate::model::{sjf_opt, SchedClass, SchedInstance};
use crate::sim::{simulate, Decision, SchedPolicy, SimState, SimView};

/// Keeps the hypotheses consistent with the processing seen so far and
/// predicts, for every unfinished job, the smallest length any of them gives.
///
/// A hypothesis drops out once a job it calls finished is still running
/// (`x_j ≥ p^i_j` for an unfinished job) or once a job finishes at another
/// length. Every change of the consistent set is a switch.
#[derive(Clone, Debug)]
pub struct MinConsistentPredictor {
    hypotheses: Vec<Vec<Rational>>,
    active: Vec<usize>,
    prediction: Vec<Rational>,
    switches: usize,
    started: bool,
    snapshots: Vec<Vec<Option<Rational>>>,
}

impl MinConsistentPredictor {
    pub fn new(hypotheses: Vec<Vec<Rational>>) -> Self {
        let n = hypotheses.first().map_or(0, Vec::len);
        MinConsistentPredictor {
            active: (0..hypotheses.len()).collect(),
            hypotheses,
            prediction: vec![Rational::ZERO; n],
            switches: 0,
            started: false,
            snapshots: Vec::new(),
        }
    }

    /// Brings the prediction up to date; returns whether it switched.
    pub fn observe(&mut self, view: &SimView<'_>) -> Result<bool, SchedError> {
        let hyps = &self.hypotheses;
        let before = self.active.len();
        self.active.retain(|&i| {
            (0..view.jobs()).all(|j| {
                if view.is_finished(j) {
                    hyps[i][j] == view.processed[j]
                } else {
                    hyps[i][j] > view.processed[j]
                }
            })
        });
        if self.active.is_empty() {
            return Err(SchedError::Exhausted);
        }
        if self.started && self.active.len() == before {
            return Ok(false);
        }
        let mut snapshot = vec![None; view.jobs()];
        for j in view.unfinished() {
            let pi = self.active.iter().map(|&i| self.hypotheses[i][j]).min().expect("non-empty");
            self.prediction[j] = pi;
            snapshot[j] = Some(pi);
        }
        self.snapshots.push(snapshot);
        let switched = self.started;
        if switched {
            self.switches += 1;
        }
        self.started = true;
        Ok(switched)
    }

    pub fn prediction(&self) -> &[Rational] {
        &self.prediction
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn switches(&self) -> usize {
        self.switches
    }

    /// The predictions of unfinished jobs after the start and each switch.
    pub fn snapshots(&self) -> &[Vec<Option<Rational>>] {
        &self.snapshots
    }
}

/// Runs the unfinished job with the smallest prediction (ties by index),
/// preempting it when a switch happens.
#[derive(Clone, Debug)]
pub struct PredictiveSpjf {
    predictor: MinConsistentPredictor,
}

impl PredictiveSpjf {
    pub fn new(hypotheses: Vec<Vec<Rational>>) -> Self {
        PredictiveSpjf {
            predictor: MinConsistentPredictor::new(hypotheses),
        }
    }

    pub fn predictor(&self) -> &MinConsistentPredictor {
        &self.predictor
    }
}

impl SchedPolicy for PredictiveSpjf {
    fn decide(&mut self, view: &SimView<'_>) -> Result<Decision, SchedError> {
        self.predictor.observe(view)?;
        let pi = self.predictor.prediction();
        let j = view
            .unfinished()
            .min_by(|&a, &b| pi[a].cmp(&pi[b]).then(a.cmp(&b)))
            .expect("called with unfinished jobs");
        Ok(Decision::run(j).watching(j, pi[j]))
    }

    fn switches(&self) -> usize {
        self.predictor.switches()
    }
}

/// Outcome of a simulated run with its diagnostics.
#[derive(Clone, Debug)]
pub struct SchedRun {
    pub record: RunRecord,
    pub sim: SimState,
    pub switches: usize,
}

/// Post-hoc checks of a realizable run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpjfChecks {
    /// Every prediction of an unfinished job was at most its true length.
    pub monotone: bool,
    /// Every completed job was a shortest unfinished job at its completion.
    pub shortest_first: bool,
}

pub fn predictive_spjf(instance: &SchedInstance, class: &SchedClass) -> Result<(SchedRun, SpjfChecks), SchedError> {
    let SchedClass::Lengths(hyps) = class else {
        return Err(SchedError::Format("predictive_spjf needs length hypotheses".into()));
    };
    if hyps.iter().any(|h| h.len() != instance.len()) {
        return Err(SchedError::Arity {
            index: 0,
            len: hyps[0].len(),
            expected: instance.len(),
        });
    }
    let mut policy = PredictiveSpjf::new(hyps.clone());
    let sim = simulate(instance, &mut policy)?;
    let p = &instance.lengths;
    let monotone = policy
        .predictor()
        .snapshots()
        .iter()
        .all(|snap| snap.iter().zip(p).all(|(pi, &pj)| pi.map_or(true, |pi| pi <= pj)));
    let order = &sim.completion_order;
    let shortest_first = (0..order.len()).all(|k| order[k..].iter().all(|&later| p[order[k]] <= p[later]));
    let (opt, _) = sjf_opt(instance);
    let switches = policy.switches();
    let record = RunRecord::new(Problem::Sched, sim.total_completion(), opt)
        .with_meta("pipeline", "predictive_spjf")
        .with_meta("sigma", switches)
        .with_meta("preemptions", sim.preemptions);
    let mut record = record;
    record.switches = switches as u64;
    Ok((SchedRun { record, sim, switches }, SpjfChecks { monotone, shortest_first }))
}

/// `regret ≤ σ·√(2·OPT)`, checked without square roots.
pub fn within_switch_bound(regret: Rational, switches: usize, opt: Rational) -> bool {
    if regret.is_negative() {
        return true;
    }
    let s = Rational::from(switches);
    regret * regret <= s * s * Rational::from(2u64) * opt
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[(i128, i128)]) -> Vec<Rational> {
        xs.iter().map(|&(a, b)| Rational::frac(a, b)).collect()
    }

    #[test]
    fn two_hypothesis_trace() {
        let class = SchedClass::lengths(vec![v(&[(3, 10), (3, 5)]), v(&[(1, 2), (2, 5)])], 2).unwrap();
        let inst = SchedInstance::new(v(&[(1, 2), (2, 5)])).unwrap();
        let (run, checks) = predictive_spjf(&inst, &class).unwrap();
        assert_eq!(run.switches, 1);
        assert_eq!(run.sim.completion, v(&[(9, 10), (7, 10)]));
        assert_eq!(run.record.objective, Rational::frac(8, 5));
        assert_eq!(run.record.opt, Rational::frac(13, 10));
        assert_eq!(run.sim.preemptions, 1);
        assert!(checks.monotone && checks.shortest_first);
        assert!(within_switch_bound(run.record.regret(), run.switches, run.record.opt));
    }

    #[test]
    fn single_correct_hypothesis() {
        let p = v(&[(1, 2), (1, 5), (7, 10)]);
        let class = SchedClass::lengths(vec![p.clone()], 3).unwrap();
        let (run, _) = predictive_spjf(&SchedInstance::new(p).unwrap(), &class).unwrap();
        assert_eq!(run.switches, 0);
        assert_eq!(run.record.regret(), Rational::ZERO);
    }

    #[test]
    fn unrealizable_input_is_flagged() {
        let class = SchedClass::lengths(vec![v(&[(1, 2), (1, 2)])], 2).unwrap();
        let inst = SchedInstance::new(v(&[(1, 2), (3, 4)])).unwrap();
        assert_eq!(predictive_spjf(&inst, &class).unwrap_err(), SchedError::Exhausted);
    }
}
