//! Prediction-following assignment and the doubling / robust drivers.
//!
//! Within one guess `c` of the optimal makespan, every hypothesis is scaled to
//! makespan in `[c, 2c]`, a predictor proposes a count table consistent with
//! the arrivals, and jobs are routed to the machines reserved for their type
//! in an offline schedule of that table. A new schedule is computed at every
//! switch (one epoch per prediction). ERR doubles `c`.

use learnaug_core::{Rational, RngStream};

use crate::error::LbError;
use crate::model::{LbClass, LbInstance, Schedule, TypeSet};
use crate::offline::{find_scaling, offline_schedule, SchedulerMode};
use crate::online::{anr_with, ExpPotential};
use crate::predictor::{LbEvent, LbPredictor, MedianPredictor, RandomPredictor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PredictorKind {
    /// Deterministic lower-median table.
    #[default]
    Median,
    /// Uniformly random consistent instance.
    Random,
}

#[derive(Clone, Debug)]
pub enum Predictor {
    Median(MedianPredictor),
    Random(RandomPredictor),
}

impl Predictor {
    pub fn new(kind: PredictorKind, instances: Vec<LbInstance>, arrived: &[u64], rng: RngStream) -> Option<Self> {
        match kind {
            PredictorKind::Median => MedianPredictor::new(instances, arrived).map(Predictor::Median),
            PredictorKind::Random => RandomPredictor::new(instances, arrived, rng).map(Predictor::Random),
        }
    }

    fn inner(&self) -> &dyn LbPredictor {
        match self {
            Predictor::Median(p) => p,
            Predictor::Random(p) => p,
        }
    }
}

impl LbPredictor for Predictor {
    fn on_arrival(&mut self, p: usize, arrived: &[u64]) -> LbEvent {
        match self {
            Predictor::Median(x) => x.on_arrival(p, arrived),
            Predictor::Random(x) => x.on_arrival(p, arrived),
        }
    }

    fn prediction(&self) -> &LbInstance {
        self.inner().prediction()
    }

    fn switches(&self) -> usize {
        self.inner().switches()
    }

    fn active(&self) -> &[usize] {
        self.inner().active()
    }
}

/// Progress through the feed shared by all iterations.
#[derive(Clone, Debug)]
pub struct FeedState {
    pub schedule: Schedule,
    /// Arrivals per type so far (cumulative over iterations).
    pub arrived: Vec<u64>,
    /// Next feed position to assign.
    pub pos: usize,
    /// Feed positions `< counted` are already in `arrived`.
    counted: usize,
}

impl FeedState {
    pub fn new(types: &TypeSet) -> Self {
        FeedState {
            schedule: Schedule::empty(types.machines()),
            arrived: vec![0; types.len()],
            pos: 0,
            counted: 0,
        }
    }

    fn count(&mut self, p: usize) {
        if self.counted == self.pos {
            self.arrived[p] += 1;
            self.counted += 1;
        }
    }
}

/// What one run of the prediction-following assignment did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpochReport {
    /// Predictions used (switches + 1).
    pub epochs: usize,
    pub switches: usize,
    /// Makespan of the offline schedule of each prediction.
    pub epoch_makespans: Vec<Rational>,
    /// Largest per-machine load added during this call.
    pub added: Rational,
    /// Stopped because the predictor reported ERR.
    pub err: bool,
    /// Every schedule was certified optimal.
    pub certified: bool,
    /// For the median predictor: stacked cover makespan at each prediction.
    pub covers: Vec<(Rational, usize)>,
}

/// Routes jobs from `state.pos` onward according to offline schedules of the
/// predictor's tables until the feed ends or the predictor reports ERR.
/// Types flagged in `direct` bypass prediction and go to their fastest machine.
pub fn assign_with_prediction(
    types: &TypeSet,
    feed: &[usize],
    predictor: &mut Predictor,
    mode: SchedulerMode,
    state: &mut FeedState,
    direct: &[bool],
    instance_makespans: Option<&[Rational]>,
) -> Result<EpochReport, LbError> {
    let before = state.schedule.loads.clone();
    let mut report = EpochReport {
        epochs: 0,
        switches: 0,
        epoch_makespans: Vec::new(),
        added: Rational::ZERO,
        err: false,
        certified: true,
        covers: Vec::new(),
    };
    let mut slots: Vec<std::collections::VecDeque<usize>> = Vec::new();
    let new_epoch = |predictor: &Predictor, report: &mut EpochReport| -> Result<Vec<std::collections::VecDeque<usize>>, LbError> {
        let sched = offline_schedule(types, predictor.prediction(), mode)?;
        report.epochs += 1;
        report.epoch_makespans.push(sched.makespan());
        report.certified &= sched.certified;
        if let (Predictor::Median(med), Some(ms)) = (predictor, instance_makespans) {
            let (stacked, _) = med.cover(ms);
            report.covers.push((stacked, med.predicted_types()));
        }
        Ok(sched.slots(types.len()).into_iter().map(Into::into).collect())
    };
    while state.pos < feed.len() {
        let p = feed[state.pos];
        if p >= types.len() {
            return Err(LbError::UnknownType(p));
        }
        if direct.get(p).copied().unwrap_or(false) {
            state.schedule.place(types.get(p), types.get(p).fastest().0);
            state.pos += 1;
            state.counted = state.counted.max(state.pos);
            continue;
        }
        if report.epochs == 0 {
            slots = new_epoch(predictor, &mut report)?;
        }
        state.count(p);
        match predictor.on_arrival(p, &state.arrived) {
            LbEvent::Err => {
                report.err = true;
                break;
            }
            LbEvent::Switched => {
                report.switches += 1;
                slots = new_epoch(predictor, &mut report)?;
            }
            LbEvent::Fits => {}
        }
        let machine = slots[p]
            .pop_front()
            .expect("a consistent prediction reserves a slot for every arrival");
        state.schedule.place(types.get(p), machine);
        state.pos += 1;
    }
    report.added = state
        .schedule
        .loads
        .iter()
        .zip(&before)
        .map(|(a, b)| *a - *b)
        .max()
        .unwrap_or(Rational::ZERO);
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct RunnerConfig {
    pub scheduler: SchedulerMode,
    pub predictor: PredictorKind,
    /// Robust runner only: the fallback budget is `γ c`. Defaults to
    /// [`default_gamma`].
    pub gamma: Option<Rational>,
}

impl Default for RunnerConfig {
    fn default() -> Self {
        RunnerConfig {
            scheduler: SchedulerMode::Auto,
            predictor: PredictorKind::Median,
            gamma: None,
        }
    }
}

/// Per-guess statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationStats {
    pub c: Rational,
    pub report: EpochReport,
    /// Largest makespan among the scaled hypotheses.
    pub kappa: Rational,
    /// Largest per-machine load added by the fallback in this iteration.
    pub fallback_added: Rational,
}

#[derive(Clone, Debug)]
pub struct LbRun {
    pub schedule: Schedule,
    pub c0: Rational,
    pub c_star: Rational,
    pub iterations: Vec<IterationStats>,
    /// Jobs of never-predicted types sent to their fastest machine.
    pub direct_jobs: usize,
    /// Jobs placed greedily after the termination guard fired.
    pub guard_jobs: usize,
    /// Jobs placed by the budgeted fallback.
    pub fallback_jobs: usize,
    pub gamma: Option<Rational>,
}

impl LbRun {
    pub fn switches(&self) -> usize {
        self.iterations.iter().map(|i| i.report.switches).sum()
    }

    pub fn epochs(&self) -> usize {
        self.iterations.iter().map(|i| i.report.epochs).sum()
    }

    pub fn certified(&self) -> bool {
        self.iterations.iter().all(|i| i.report.certified)
    }
}

fn ceil_log2(x: usize) -> u32 {
    x.max(1).next_power_of_two().trailing_zeros()
}

/// Per-iteration cap `2ρκ/c · (log2 ℓ + 1)` with `ρ = 1` and prediction
/// makespan `κ ≤ 4c` (times `ceil(log2 τ)` for the median table).
pub fn default_gamma(kind: PredictorKind, ell: usize, tau: usize) -> Rational {
    let per_prediction = match kind {
        PredictorKind::Random => 4,
        PredictorKind::Median => 4 * ceil_log2(tau).max(1) as i64,
    };
    Rational::from(2 * per_prediction * (ceil_log2(ell) as i64 + 1))
}

fn scale_all(class: &LbClass, c: Rational, mode: SchedulerMode) -> Result<(Vec<LbInstance>, Vec<Rational>), LbError> {
    let mut instances = Vec::new();
    let mut makespans = Vec::new();
    for h in &class.hypotheses {
        let s = find_scaling(&class.types, h, c, mode)?;
        makespans.push(s.schedule.makespan());
        instances.push(s.instance);
    }
    Ok((instances, makespans))
}

fn c_zero(class: &LbClass, mode: SchedulerMode) -> Result<Rational, LbError> {
    let mut c0 = Rational::ZERO;
    for h in &class.hypotheses {
        let inst = crate::model::scale_hypothesis(h, 1)?;
        c0 = c0.max(offline_schedule(&class.types, &inst, mode)?.makespan());
    }
    Ok(c0)
}

/// Doubling over the guess `c`, starting from the largest makespan of the
/// unscaled hypotheses. Jobs of types no hypothesis predicts go straight to
/// their fastest machine.
///
/// Termination guard: if ERR happens with `c` already above `Σ_j min_i p_j(i)`
/// of the whole feed (an upper bound on OPT, so this never happens when the
/// input is one of the scaled hypotheses), the rest of the feed is placed
/// greedily instead of doubling forever.
pub fn doubling_runner(class: &LbClass, feed: &[usize], config: &RunnerConfig, rng: RngStream) -> Result<LbRun, LbError> {
    let types = &class.types;
    let direct = class.never_predicted();
    let c0 = c_zero(class, config.scheduler)?;
    let work_bound: Rational = feed.iter().map(|&p| types.get(p).min_time()).sum();
    let mut state = FeedState::new(types);
    let mut run = LbRun {
        schedule: Schedule::empty(types.machines()),
        c0,
        c_star: c0,
        iterations: Vec::new(),
        direct_jobs: feed.iter().filter(|&&p| direct.get(p).copied().unwrap_or(false)).count(),
        guard_jobs: 0,
        fallback_jobs: 0,
        gamma: None,
    };
    let mut c = c0;
    for iteration in 0u64.. {
        let (instances, makespans) = scale_all(class, c, config.scheduler)?;
        let kappa = makespans.iter().copied().max().unwrap_or(Rational::ZERO);
        run.c_star = c;
        let report = match Predictor::new(config.predictor, instances, &state.arrived, rng.split(iteration)) {
            Some(mut predictor) => assign_with_prediction(types, feed, &mut predictor, config.scheduler, &mut state, &direct, Some(&makespans))?,
            None => EpochReport {
                epochs: 0,
                switches: 0,
                epoch_makespans: Vec::new(),
                added: Rational::ZERO,
                err: true,
                certified: true,
                covers: Vec::new(),
            },
        };
        let err = report.err;
        run.iterations.push(IterationStats {
            c,
            report,
            kappa,
            fallback_added: Rational::ZERO,
        });
        if state.pos == feed.len() && !err {
            break;
        }
        if c > work_bound {
            for &p in &feed[state.pos..] {
                let ty = types.get(p);
                let i = greedy_on(&state.schedule.loads, ty);
                state.schedule.place(ty, i);
                run.guard_jobs += 1;
            }
            break;
        }
        c = c * Rational::from(2u64);
    }
    run.schedule = state.schedule;
    Ok(run)
}

fn greedy_on(loads: &[Rational], ty: &crate::model::JobType) -> usize {
    ty.times()
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.map(|t| (i, loads[i] + t)))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("validated type")
        .0
}

/// Like [`doubling_runner`], but after ERR at guess `c` the exponential
/// potential algorithm places jobs while its own makespan in this iteration
/// stays within `γ c`; the job that would exceed it waits for the next guess.
/// Every type goes through the predictor.
pub fn robust_runner(class: &LbClass, feed: &[usize], config: &RunnerConfig, rng: RngStream) -> Result<LbRun, LbError> {
    let types = &class.types;
    let none = vec![false; types.len()];
    let gamma = config
        .gamma
        .unwrap_or_else(|| default_gamma(config.predictor, class.len(), types.len()));
    let c0 = c_zero(class, config.scheduler)?;
    let mut state = FeedState::new(types);
    let mut run = LbRun {
        schedule: Schedule::empty(types.machines()),
        c0,
        c_star: c0,
        iterations: Vec::new(),
        direct_jobs: 0,
        guard_jobs: 0,
        fallback_jobs: 0,
        gamma: Some(gamma),
    };
    let mut c = c0;
    for iteration in 0u64.. {
        let (instances, makespans) = scale_all(class, c, config.scheduler)?;
        let kappa = makespans.iter().copied().max().unwrap_or(Rational::ZERO);
        run.c_star = c;
        let report = match Predictor::new(config.predictor, instances, &state.arrived, rng.split(iteration)) {
            Some(mut predictor) => assign_with_prediction(types, feed, &mut predictor, config.scheduler, &mut state, &none, Some(&makespans))?,
            None => EpochReport {
                epochs: 0,
                switches: 0,
                epoch_makespans: Vec::new(),
                added: Rational::ZERO,
                err: true,
                certified: true,
                covers: Vec::new(),
            },
        };
        let mut stats = IterationStats {
            c,
            report,
            kappa,
            fallback_added: Rational::ZERO,
        };
        if state.pos < feed.len() {
            let budget = gamma * c;
            let policy = ExpPotential::for_budget(types.machines(), budget);
            let capped = anr_with(policy, types, &feed[state.pos..], budget);
            for (k, &i) in capped.schedule.assignment.iter().enumerate() {
                let p = feed[state.pos + k];
                if state.counted == state.pos + k {
                    state.arrived[p] += 1;
                    state.counted += 1;
                }
                state.schedule.place(types.get(p), i);
            }
            state.pos += capped.assigned;
            run.fallback_jobs += capped.assigned;
            stats.fallback_added = capped.schedule.makespan;
        }
        run.iterations.push(stats);
        if state.pos == feed.len() {
            break;
        }
        c = c * Rational::from(2u64);
    }
    run.schedule = state.schedule;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{JobType, LbHypothesis};
    use crate::offline::exact_opt;

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    fn two_type_class() -> LbClass {
        let types = TypeSet::new(
            2,
            vec![
                JobType::unrelated(&[r(1), r(3)]).unwrap(),
                JobType::unrelated(&[r(3), r(1)]).unwrap(),
                JobType::unrelated(&[r(2), r(2)]).unwrap(),
            ],
        )
        .unwrap();
        let q = Rational::frac(1, 4);
        let hyps = vec![
            LbHypothesis::new(vec![Rational::frac(1, 2), Rational::frac(1, 2), Rational::ZERO], q).unwrap(),
            LbHypothesis::new(vec![Rational::frac(3, 4), Rational::ZERO, Rational::frac(1, 4)], q).unwrap(),
        ];
        LbClass::new(types, hyps).unwrap()
    }

    #[test]
    fn single_correct_hypothesis_finishes_in_first_iteration() {
        let types = TypeSet::new(2, vec![JobType::unrelated(&[r(1), r(1)]).unwrap()]).unwrap();
        let class = LbClass::new(types, vec![LbHypothesis::new(vec![Rational::ONE], Rational::frac(1, 4)).unwrap()]).unwrap();
        let feed = vec![0; 4];
        let run = doubling_runner(&class, &feed, &RunnerConfig::default(), RngStream::new(0, 0)).unwrap();
        assert_eq!(run.iterations.len(), 1);
        assert_eq!(run.schedule.makespan, r(2));
        assert!(run.c_star >= exact_opt(&class.types, &feed).unwrap());
    }

    #[test]
    fn realizable_runs_are_consistent() {
        let class = two_type_class();
        // truth: hypothesis 1 scaled by 2 → six of type 0, two of type 2
        let feed = vec![0, 2, 0, 0, 0, 2, 0, 0];
        for kind in [PredictorKind::Median, PredictorKind::Random] {
            for seed in 0..10 {
                let cfg = RunnerConfig {
                    predictor: kind,
                    ..Default::default()
                };
                let run = doubling_runner(&class, &feed, &cfg, RngStream::new(seed, 0)).unwrap();
                assert!(run.schedule.verify(&class.types, &feed));
                assert_eq!(run.guard_jobs, 0);
                let opt = exact_opt(&class.types, &feed).unwrap();
                assert!(run.c_star <= r(2) * opt, "c* {} opt {}", run.c_star, opt);
                for it in &run.iterations {
                    assert_eq!(it.report.epochs, it.report.switches + usize::from(it.report.epochs > 0));
                    let cap: Rational = it.report.epoch_makespans.iter().sum();
                    assert!(it.report.added <= cap);
                }
            }
        }
    }

    #[test]
    fn never_predicted_types_go_fast() {
        let class = two_type_class();
        let types = {
            let mut t = class.types.clone();
            t.intern(JobType::unrelated(&[r(5), r(1)]).unwrap()).unwrap();
            t
        };
        let mut hyps = class.hypotheses.clone();
        for h in &mut hyps {
            h.freqs.push(Rational::ZERO);
        }
        let class = LbClass::new(types, hyps).unwrap();
        let feed = vec![3, 0, 1, 3];
        let run = doubling_runner(&class, &feed, &RunnerConfig::default(), RngStream::new(0, 0)).unwrap();
        assert_eq!(run.direct_jobs, 2);
        assert_eq!(run.schedule.assignment[0], 1);
        assert!(run.schedule.verify(&class.types, &feed));
    }

    #[test]
    fn unsubsumable_input_terminates() {
        // types 0 and 1 never appear together in one hypothesis
        let types = TypeSet::new(2, vec![JobType::unrelated(&[r(1), r(1)]).unwrap(), JobType::unrelated(&[r(2), r(1)]).unwrap()]).unwrap();
        let hyps = vec![
            LbHypothesis::new(vec![Rational::ONE, Rational::ZERO], Rational::ONE).unwrap(),
            LbHypothesis::new(vec![Rational::ZERO, Rational::ONE], Rational::ONE).unwrap(),
        ];
        let class = LbClass::new(types, hyps).unwrap();
        let feed = vec![0, 1, 0, 1];
        let run = doubling_runner(&class, &feed, &RunnerConfig::default(), RngStream::new(0, 0)).unwrap();
        assert!(run.guard_jobs > 0);
        assert!(run.schedule.verify(&class.types, &feed));
        let robust = robust_runner(&class, &feed, &RunnerConfig::default(), RngStream::new(0, 0)).unwrap();
        assert!(robust.fallback_jobs > 0);
        assert!(robust.schedule.verify(&class.types, &feed));
    }

    #[test]
    fn one_machine_ratio_one() {
        let types = TypeSet::new(1, vec![JobType::unrelated(&[r(2)]).unwrap(), JobType::unrelated(&[r(3)]).unwrap()]).unwrap();
        let hyps = vec![LbHypothesis::new(vec![Rational::ONE, Rational::ZERO], Rational::ONE).unwrap()];
        let class = LbClass::new(types, hyps).unwrap();
        let feed = vec![1, 0, 1, 1, 0];
        let run = robust_runner(&class, &feed, &RunnerConfig::default(), RngStream::new(0, 0)).unwrap();
        assert_eq!(run.schedule.makespan, r(13));
    }
}
