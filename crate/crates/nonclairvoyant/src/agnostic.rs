//! Ordering hypotheses in the agnostic setting: learn the best ordering from
//! a sample of job pairs processed up front, then follow it.

use learnaug_core::{Problem, Rational, RngStream, RunRecord};

use crate::error::SchedError;
use crate::model::{mu_over, mu_weight, sjf_opt, SchedClass, SchedInstance};
use crate::realizable::SchedRun;
use crate::sim::{simulate, Decision, SchedPolicy, SimView};

/// Sampled job pairs and the accuracy parameters behind their number.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSample {
    /// Unordered pairs `(i, j)` with `i < j`, drawn with replacement.
    pub pairs: Vec<(usize, usize)>,
    pub m: usize,
    pub epsilon: f64,
    pub delta_conf: f64,
}

impl PairSample {
    /// Sampled jobs in draw order without repeats.
    pub fn prefix(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for &(i, j) in &self.pairs {
            for x in [i, j] {
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out
    }
}

/// `ε = min(1/2, (ln(2ℓ/δ)/n)^{1/3})` and `m = ceil(ln(2ℓ/δ) / (2ε²))`.
pub fn sample_size(n: usize, ell: usize, delta_conf: f64) -> (f64, usize) {
    let log_term = (2.0 * ell as f64 / delta_conf).ln();
    let epsilon = (log_term / n as f64).cbrt().min(0.5);
    (epsilon, (log_term / (2.0 * epsilon * epsilon)).ceil() as usize)
}

pub fn sample_pairs(n: usize, ell: usize, delta_conf: f64, rng: &mut RngStream) -> Result<PairSample, SchedError> {
    if n < 2 {
        return Err(SchedError::TooFewJobs { n, need: 2 });
    }
    if !(delta_conf > 0.0 && delta_conf < 1.0) {
        return Err(SchedError::InvalidSpeed(delta_conf.to_string()));
    }
    let (epsilon, m) = sample_size(n, ell.max(1), delta_conf);
    let mut pairs = Vec::with_capacity(m);
    for _ in 0..m {
        let i = rng.uniform_index(n)?;
        let mut j = rng.uniform_index(n - 1)?;
        if j >= i {
            j += 1;
        }
        pairs.push((i.min(j), i.max(j)));
    }
    Ok(PairSample {
        pairs,
        m,
        epsilon,
        delta_conf,
    })
}

/// Runs the sampled jobs first, then switches once to the hypothesis with the
/// smallest mistake weight on the sample. Jobs always run to completion.
#[derive(Clone, Debug)]
pub struct AgnosticPolicy {
    hypotheses: Vec<Vec<usize>>,
    sample: PairSample,
    order: Vec<usize>,
    chosen: Option<usize>,
}

impl AgnosticPolicy {
    pub fn new(hypotheses: Vec<Vec<usize>>, sample: PairSample, n: usize) -> Self {
        let mut order = sample.prefix();
        let rest: Vec<usize> = (0..n).filter(|j| !order.contains(j)).collect();
        order.extend(rest);
        AgnosticPolicy {
            hypotheses,
            sample,
            order,
            chosen: None,
        }
    }

    pub fn chosen(&self) -> Option<usize> {
        self.chosen
    }

    fn choose(&mut self, view: &SimView<'_>) {
        let lengths = view.processed;
        let best = (0..self.hypotheses.len())
            .min_by(|&a, &b| {
                mu_over(lengths, &self.hypotheses[a], Some(&self.sample.pairs))
                    .cmp(&mu_over(lengths, &self.hypotheses[b], Some(&self.sample.pairs)))
                    .then(a.cmp(&b))
            })
            .expect("non-empty class");
        self.chosen = Some(best);
        let done: Vec<usize> = self.order.iter().copied().filter(|&j| view.is_finished(j)).collect();
        let rest = self.hypotheses[best].iter().copied().filter(|&j| !view.is_finished(j));
        self.order = done.into_iter().chain(rest).collect();
    }
}

impl SchedPolicy for AgnosticPolicy {
    fn decide(&mut self, view: &SimView<'_>) -> Result<Decision, SchedError> {
        if self.chosen.is_none() && self.sample.pairs.iter().all(|&(i, j)| view.is_finished(i) && view.is_finished(j)) {
            self.choose(view);
        }
        let j = self
            .order
            .iter()
            .copied()
            .find(|&j| !view.is_finished(j))
            .expect("called with unfinished jobs");
        Ok(Decision::run(j))
    }

    fn switches(&self) -> usize {
        usize::from(self.chosen.is_some())
    }
}

/// An agnostic run with the quantities its guarantee is stated in.
#[derive(Clone, Debug)]
pub struct AgnosticRun {
    pub run: SchedRun,
    pub sample: PairSample,
    pub chosen: Option<usize>,
    /// Mistake weight of the executed order.
    pub mu_final: Rational,
    /// Smallest mistake weight over the class.
    pub mu_best: Rational,
}

impl AgnosticRun {
    /// `μ(h⋆) + 2ε·C(n,2) + 2mn`.
    pub fn bound(&self) -> f64 {
        let n = self.run.sim.completion.len() as f64;
        self.mu_best.to_f64() + 2.0 * self.sample.epsilon * n * (n - 1.0) / 2.0 + 2.0 * self.sample.m as f64 * n
    }
}

pub fn agnostic_run(instance: &SchedInstance, class: &SchedClass, delta_conf: f64, mut rng: RngStream) -> Result<AgnosticRun, SchedError> {
    let SchedClass::Perms(hyps) = class else {
        return Err(SchedError::Format("agnostic_run needs ordering hypotheses".into()));
    };
    let n = instance.len();
    let seed = rng.seed();
    let sample = sample_pairs(n, hyps.len(), delta_conf, &mut rng)?;
    let mut policy = AgnosticPolicy::new(hyps.clone(), sample.clone(), n);
    let sim = simulate(instance, &mut policy)?;
    let (opt, _) = sjf_opt(instance);
    let mu_final = mu_weight(instance, &sim.completion_order, None);
    let mu_best = hyps.iter().map(|h| mu_weight(instance, h, None)).min().expect("non-empty class");
    let switches = policy.switches();
    let mut record = RunRecord::new(Problem::Sched, sim.total_completion(), opt)
        .with_meta("pipeline", "agnostic")
        .with_meta("sigma", switches)
        .with_meta("preemptions", sim.preemptions)
        .with_meta("mu_final", mu_final)
        .with_meta("pairs", sample.m);
    record.switches = switches as u64;
    record.mistakes = mu_final;
    record.seed = seed;
    Ok(AgnosticRun {
        chosen: policy.chosen(),
        run: SchedRun { record, sim, switches },
        sample,
        mu_final,
        mu_best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_size_example() {
        let (_, m) = sample_size(1, 2, 0.2);
        assert_eq!(m, 6);
        let (e1, m1) = sample_size(1000, 2, 0.2);
        let (e2, m2) = sample_size(1000, 64, 0.2);
        assert!(e2 >= e1 && m2 >= m1);
    }

    #[test]
    fn two_jobs_single_pair() {
        let s = sample_pairs(2, 3, 0.1, &mut RngStream::new(0, 0)).unwrap();
        assert!(s.pairs.iter().all(|&p| p == (0, 1)));
    }

    #[test]
    fn regret_is_mistake_weight() {
        let mut rng = RngStream::new(4, 0);
        for trial in 0..30 {
            let n = 12;
            let inst = SchedInstance::new((0..n).map(|_| Rational::frac(1 + rng.uniform_index(10).unwrap() as i128, 10)).collect()).unwrap();
            let hyps: Vec<Vec<usize>> = (0..3)
                .map(|_| {
                    let mut h: Vec<usize> = (0..n).collect();
                    rng.shuffle(&mut h);
                    h
                })
                .collect();
            let class = SchedClass::perms(hyps.clone(), n).unwrap();
            let out = agnostic_run(&inst, &class, 0.1, RngStream::new(trial, 1)).unwrap();
            assert_eq!(out.run.record.regret(), out.mu_final);
            assert_eq!(out.run.sim.preemptions, 0);
        }
    }

    #[test]
    fn single_hypothesis_is_followed() {
        let n = 20;
        let inst = SchedInstance::new((0..n).map(|j| Rational::frac(1 + j as i128, 20)).collect()).unwrap();
        let h: Vec<usize> = (0..n).rev().collect();
        let class = SchedClass::perms(vec![h.clone()], n).unwrap();
        let out = agnostic_run(&inst, &class, 0.2, RngStream::new(0, 0)).unwrap();
        let prefix = out.sample.prefix();
        assert_eq!(out.run.sim.completion_order[..prefix.len()], prefix[..]);
        let rest: Vec<usize> = h.into_iter().filter(|j| !prefix.contains(j)).collect();
        assert_eq!(out.run.sim.completion_order[prefix.len()..], rest[..]);
        assert!(out.mu_final.to_f64() <= out.bound());
    }
}
