//! Offline makespan schedulers: an exact search and a greedy heuristic.
//!
//! The exact scheduler walks the jobs (longest first) keeping every distinct
//! vector of machine loads reachable so far. Identical jobs collapse into the
//! same load vectors, so instances with few types stay small even when they
//! have dozens of jobs. States that cannot beat the greedy makespan are
//! pruned.

use std::collections::HashMap;

use learnaug_core::Rational;

use crate::error::LbError;
use crate::model::{scale_hypothesis, LbHypothesis, LbInstance, Schedule, TypeSet};

/// Which offline algorithm computes schedules of (predicted) instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SchedulerMode {
    /// Optimal; fails above the search cap.
    Exact,
    /// Each job, longest first, to the machine with the smallest resulting load.
    Greedy,
    /// Exact when within the cap, greedy otherwise.
    #[default]
    Auto,
}

/// A schedule of an instance's job list (`LbInstance::jobs` order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OfflineSchedule {
    pub schedule: Schedule,
    pub jobs: Vec<usize>,
    /// The makespan is optimal (ratio 1).
    pub certified: bool,
}

impl OfflineSchedule {
    pub fn makespan(&self) -> Rational {
        self.schedule.makespan
    }

    /// Machines reserved for each type, in job order.
    pub fn slots(&self, types: usize) -> Vec<Vec<usize>> {
        let mut slots = vec![Vec::new(); types];
        for (&p, &i) in self.jobs.iter().zip(&self.schedule.assignment) {
            slots[p].push(i);
        }
        slots
    }
}

/// Load vectors kept per layer beyond the always-admitted size.
const STATE_CAP: usize = 2_000_000;

fn admitted_without_cap(n: usize, m: usize) -> bool {
    n <= 12 && m <= 5
}

/// Job order used by both schedulers: longest minimum time first.
fn processing_order(types: &TypeSet, jobs: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by(|&a, &b| {
        types
            .get(jobs[b])
            .min_time()
            .cmp(&types.get(jobs[a]).min_time())
            .then(jobs[a].cmp(&jobs[b]))
            .then(a.cmp(&b))
    });
    order
}

fn build(types: &TypeSet, jobs: &[usize], order: &[usize], machines_in_order: &[usize]) -> Schedule {
    let mut assignment = vec![0; jobs.len()];
    for (&j, &i) in order.iter().zip(machines_in_order) {
        assignment[j] = i;
    }
    let mut s = Schedule::empty(types.machines());
    for (&p, &i) in jobs.iter().zip(&assignment) {
        s.place(types.get(p), i);
    }
    s
}

fn greedy(types: &TypeSet, jobs: &[usize]) -> Schedule {
    let order = processing_order(types, jobs);
    let mut loads = vec![Rational::ZERO; types.machines()];
    let mut picks = Vec::with_capacity(jobs.len());
    for &j in &order {
        let ty = types.get(jobs[j]);
        let (i, t) = (0..types.machines())
            .filter_map(|i| ty.time(i).map(|t| (i, t)))
            .min_by(|a, b| (loads[a.0] + a.1).cmp(&(loads[b.0] + b.1)).then(a.0.cmp(&b.0)))
            .expect("validated type");
        loads[i] += t;
        picks.push(i);
    }
    build(types, jobs, &order, &picks)
}

fn exact(types: &TypeSet, jobs: &[usize]) -> Result<Schedule, LbError> {
    let m = types.machines();
    let upper = greedy(types, jobs);
    let bound = upper.makespan;
    let uncapped = admitted_without_cap(jobs.len(), m);
    let order = processing_order(types, jobs);
    // remaining[k] = Σ of min times of jobs order[k..]
    let mut remaining = vec![Rational::ZERO; order.len() + 1];
    for k in (0..order.len()).rev() {
        remaining[k] = remaining[k + 1] + types.get(jobs[order[k]]).min_time();
    }
    let m_rat = Rational::from(m);

    // layers[k] holds (loads, parent index in layers[k-1], machine)
    let mut layers: Vec<Vec<(Vec<Rational>, usize, usize)>> = vec![vec![(vec![Rational::ZERO; m], 0, 0)]];
    for (k, &j) in order.iter().enumerate() {
        let ty = types.get(jobs[j]);
        let mut next: Vec<(Vec<Rational>, usize, usize)> = Vec::new();
        let mut seen: HashMap<Vec<Rational>, ()> = HashMap::new();
        for (parent, (loads, _, _)) in layers[k].iter().enumerate() {
            let total: Rational = loads.iter().sum();
            for i in 0..m {
                let Some(t) = ty.time(i) else { continue };
                let new_load = loads[i] + t;
                if new_load > bound {
                    continue;
                }
                if (total + t + remaining[k + 1]) / m_rat > bound {
                    continue;
                }
                let mut child = loads.clone();
                child[i] = new_load;
                if seen.insert(child.clone(), ()).is_none() {
                    next.push((child, parent, i));
                }
            }
        }
        if !uncapped && next.len() > STATE_CAP {
            return Err(LbError::TooLarge(format!(
                "{} jobs on {m} machines reach more than {STATE_CAP} load vectors",
                jobs.len()
            )));
        }
        if next.is_empty() {
            // only reachable if the greedy schedule itself was pruned away
            return Ok(upper);
        }
        layers.push(next);
    }
    let last = layers.last().expect("at least the root layer");
    let (mut idx, _) = last
        .iter()
        .enumerate()
        .map(|(i, (loads, _, _))| (i, loads.iter().copied().max().unwrap_or(Rational::ZERO)))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("non-empty layer");
    let mut picks = vec![0; order.len()];
    for k in (1..layers.len()).rev() {
        let (_, parent, machine) = &layers[k][idx];
        picks[k - 1] = *machine;
        idx = *parent;
    }
    Ok(build(types, jobs, &order, &picks))
}

/// Schedules every job of `instance`.
pub fn offline_schedule(types: &TypeSet, instance: &LbInstance, mode: SchedulerMode) -> Result<OfflineSchedule, LbError> {
    if instance.counts.len() > types.len() {
        return Err(LbError::UnknownType(instance.counts.len() - 1));
    }
    let jobs = instance.jobs();
    let (schedule, certified) = match mode {
        SchedulerMode::Greedy => (greedy(types, &jobs), false),
        SchedulerMode::Exact => (exact(types, &jobs)?, true),
        SchedulerMode::Auto => match exact(types, &jobs) {
            Ok(s) => (s, true),
            Err(LbError::TooLarge(_)) => (greedy(types, &jobs), false),
            Err(e) => return Err(e),
        },
    };
    Ok(OfflineSchedule {
        schedule,
        jobs,
        certified,
    })
}

/// Optimal makespan of an arrival sequence.
pub fn exact_opt(types: &TypeSet, feed: &[usize]) -> Result<Rational, LbError> {
    let inst = LbInstance::from_feed(feed, types.len());
    Ok(offline_schedule(types, &inst, SchedulerMode::Exact)?.makespan())
}

/// A scaling of a hypothesis together with its schedule.
#[derive(Clone, Debug)]
pub struct Scaled {
    pub h: u64,
    pub instance: LbInstance,
    pub schedule: OfflineSchedule,
}

/// Doubles `h` from 1 until the schedule of `H(h)` has makespan at least `c`.
///
/// With an optimal scheduler this leaves `OPT(H(h))` in `[c, 2c]` whenever
/// `c` exceeds the makespan of `H(1)`; otherwise `h = 1`.
pub fn find_scaling(
    types: &TypeSet,
    hypothesis: &LbHypothesis,
    c: Rational,
    mode: SchedulerMode,
) -> Result<Scaled, LbError> {
    let mut h = 1u64;
    loop {
        let instance = scale_hypothesis(hypothesis, h)?;
        let schedule = offline_schedule(types, &instance, mode)?;
        if schedule.makespan() >= c {
            return Ok(Scaled { h, instance, schedule });
        }
        h = h.checked_mul(2).ok_or(learnaug_core::ArithError::Overflow)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::JobType;
    use proptest::prelude::*;

    fn r(n: i128) -> Rational {
        Rational::from(n as i64)
    }

    fn types(m: usize, rows: &[&[i128]]) -> TypeSet {
        TypeSet::new(
            m,
            rows.iter()
                .map(|row| JobType::unrelated(&row.iter().map(|&x| r(x)).collect::<Vec<_>>()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    /// Tries every assignment.
    fn brute(ts: &TypeSet, jobs: &[usize]) -> Rational {
        let m = ts.machines();
        let mut best: Option<Rational> = None;
        let total = m.pow(jobs.len() as u32);
        for code in 0..total {
            let mut c = code;
            let mut loads = vec![Rational::ZERO; m];
            let mut ok = true;
            for &p in jobs {
                let i = c % m;
                c /= m;
                match ts.get(p).time(i) {
                    Some(t) => loads[i] += t,
                    None => ok = false,
                }
            }
            if ok {
                let mk = loads.into_iter().max().unwrap();
                best = Some(best.map_or(mk, |b: Rational| b.min(mk)));
            }
        }
        best.unwrap_or(Rational::ZERO)
    }

    #[test]
    fn two_crossed_jobs() {
        let ts = types(2, &[&[1, 2], &[2, 1]]);
        let s = offline_schedule(&ts, &LbInstance::new(vec![1, 1]), SchedulerMode::Exact).unwrap();
        assert_eq!(s.schedule.loads, vec![r(1), r(1)]);
        assert_eq!(s.makespan(), r(1));
        assert!(s.certified);
        assert!(s.schedule.verify(&ts, &s.jobs));
    }

    #[test]
    fn single_machine_sums() {
        let ts = types(1, &[&[3], &[5]]);
        let s = offline_schedule(&ts, &LbInstance::new(vec![2, 1]), SchedulerMode::Exact).unwrap();
        assert_eq!(s.makespan(), r(11));
    }

    #[test]
    fn three_unit_jobs() {
        let ts = types(2, &[&[1, 1]]);
        let s = offline_schedule(&ts, &LbInstance::new(vec![3]), SchedulerMode::Exact).unwrap();
        assert_eq!(s.makespan(), r(2));
    }

    #[test]
    fn restricted_jobs_respect_machines() {
        let ts = TypeSet::new(3, vec![JobType::restricted(3, |i| i == 2).unwrap(), JobType::restricted(3, |_| true).unwrap()]).unwrap();
        let s = offline_schedule(&ts, &LbInstance::new(vec![2, 4]), SchedulerMode::Exact).unwrap();
        assert_eq!(s.makespan(), r(2));
        assert!(s.schedule.verify(&ts, &s.jobs));
        assert_eq!(s.slots(2)[0], vec![2, 2]);
    }

    #[test]
    fn scaling_examples() {
        let ts = types(1, &[&[1]]);
        let h = LbHypothesis::new(vec![Rational::ONE], Rational::ONE).unwrap();
        let s = find_scaling(&ts, &h, r(2), SchedulerMode::Exact).unwrap();
        assert_eq!((s.h, s.schedule.makespan()), (2, r(2)));
        assert_eq!(find_scaling(&ts, &h, Rational::frac(1, 2), SchedulerMode::Exact).unwrap().h, 1);
        let s = find_scaling(&ts, &h, r(5), SchedulerMode::Exact).unwrap();
        assert_eq!((s.h, s.schedule.makespan()), (8, r(8)));
    }

    #[test]
    fn many_identical_jobs_are_cheap() {
        let ts = types(3, &[&[1, 2, 3], &[2, 1, 3], &[3, 3, 1], &[2, 2, 2]]);
        let s = offline_schedule(&ts, &LbInstance::new(vec![15, 15, 15, 15]), SchedulerMode::Exact).unwrap();
        assert!(s.certified);
        assert!(s.schedule.verify(&ts, &s.jobs));
        let total_min = Rational::from(45u64);
        assert!(s.makespan() >= total_min / Rational::from(3u64));
    }

    proptest! {
        #[test]
        fn exact_matches_brute_force(
            m in 1usize..4,
            raw in proptest::collection::vec(proptest::collection::vec(proptest::option::weighted(0.8, 1i64..6), 3), 1..4),
            counts in proptest::collection::vec(0u64..3, 3),
        ) {
            let rows: Vec<JobType> = raw.iter()
                .map(|row| {
                    let mut times: Vec<Option<Rational>> = row[..m].iter().map(|x| x.map(Rational::from)).collect();
                    if times.iter().all(Option::is_none) { times[0] = Some(Rational::ONE); }
                    JobType::new(times).unwrap()
                })
                .collect();
            let ts = TypeSet::new(m, rows).unwrap();
            let inst = LbInstance::new(counts[..ts.len()].to_vec());
            let s = offline_schedule(&ts, &inst, SchedulerMode::Exact).unwrap();
            prop_assert!(s.schedule.verify(&ts, &s.jobs));
            prop_assert_eq!(s.makespan(), brute(&ts, &s.jobs));
            let g = offline_schedule(&ts, &inst, SchedulerMode::Greedy).unwrap();
            prop_assert!(g.makespan() >= s.makespan());
        }
    }
}
