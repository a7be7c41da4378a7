//! Prediction-free online assignment rules.

use learnaug_core::Rational;

use crate::model::{JobType, Schedule, TypeSet};

/// A deterministic online load-balancing algorithm with its own loads.
pub trait LbPolicy {
    fn name(&self) -> &str;

    /// Chooses the machine for the next job and records it.
    fn assign(&mut self, ty: &JobType) -> usize;

    fn loads(&self) -> &[Rational];

    fn makespan(&self) -> Rational {
        self.loads().iter().copied().max().unwrap_or(Rational::ZERO)
    }
}

fn allowed(ty: &JobType) -> impl Iterator<Item = (usize, Rational)> + '_ {
    ty.times().iter().enumerate().filter_map(|(i, t)| t.map(|t| (i, t)))
}

/// Each job to the machine with the smallest resulting load.
#[derive(Clone, Debug)]
pub struct GreedyLoad {
    loads: Vec<Rational>,
}

impl GreedyLoad {
    pub fn new(m: usize) -> Self {
        GreedyLoad {
            loads: vec![Rational::ZERO; m],
        }
    }
}

impl LbPolicy for GreedyLoad {
    fn name(&self) -> &str {
        "greedy"
    }

    fn assign(&mut self, ty: &JobType) -> usize {
        let (i, t) = allowed(ty)
            .min_by(|a, b| (self.loads[a.0] + a.1).cmp(&(self.loads[b.0] + b.1)).then(a.0.cmp(&b.0)))
            .expect("validated type");
        self.loads[i] += t;
        i
    }

    fn loads(&self) -> &[Rational] {
        &self.loads
    }
}

/// Each job to its fastest machine.
#[derive(Clone, Debug)]
pub struct FastestMachine {
    loads: Vec<Rational>,
}

impl FastestMachine {
    pub fn new(m: usize) -> Self {
        FastestMachine {
            loads: vec![Rational::ZERO; m],
        }
    }
}

impl LbPolicy for FastestMachine {
    fn name(&self) -> &str {
        "fastest"
    }

    fn assign(&mut self, ty: &JobType) -> usize {
        let (i, t) = ty.fastest();
        self.loads[i] += t;
        i
    }

    fn loads(&self) -> &[Rational] {
        &self.loads
    }
}

/// Exponential-potential assignment: each job goes where it increases
/// `Σ_i 2^{load_i / Λ}` the least.
#[derive(Clone, Debug)]
pub struct ExpPotential {
    loads: Vec<Rational>,
    lambda: f64,
}

impl ExpPotential {
    pub fn new(m: usize, lambda: Rational) -> Self {
        ExpPotential {
            loads: vec![Rational::ZERO; m],
            lambda: lambda.to_f64(),
        }
    }

    /// The scale `Λ = budget / max(1, log2 m)`.
    pub fn for_budget(m: usize, budget: Rational) -> Self {
        let lambda = budget.to_f64() / (m as f64).log2().max(1.0);
        ExpPotential {
            loads: vec![Rational::ZERO; m],
            lambda,
        }
    }

    /// Machine the next job of type `ty` would go to, and its time there.
    pub fn choose(&self, ty: &JobType) -> (usize, Rational) {
        let increase = |i: usize, t: Rational| {
            let before = self.loads[i].to_f64() / self.lambda;
            let after = (self.loads[i] + t).to_f64() / self.lambda;
            after.exp2() - before.exp2()
        };
        allowed(ty)
            .min_by(|a, b| increase(a.0, a.1).total_cmp(&increase(b.0, b.1)).then(a.0.cmp(&b.0)))
            .expect("validated type")
    }
}

impl LbPolicy for ExpPotential {
    fn name(&self) -> &str {
        "anr"
    }

    fn assign(&mut self, ty: &JobType) -> usize {
        let (i, t) = self.choose(ty);
        self.loads[i] += t;
        i
    }

    fn loads(&self) -> &[Rational] {
        &self.loads
    }
}

/// Result of a budget-capped potential run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CappedRun {
    /// Schedule of the assigned prefix of the feed.
    pub schedule: Schedule,
    /// Number of feed jobs assigned; the rest are returned to the caller.
    pub assigned: usize,
}

/// Assigns jobs of `feed` with the exponential potential until the next
/// assignment would push its makespan above `budget`.
pub fn anr_online(types: &TypeSet, feed: &[usize], budget: Rational) -> CappedRun {
    let m = types.machines();
    let policy = ExpPotential::for_budget(m, budget);
    anr_with(policy, types, feed, budget)
}

pub(crate) fn anr_with(mut policy: ExpPotential, types: &TypeSet, feed: &[usize], budget: Rational) -> CappedRun {
    let mut schedule = Schedule::empty(types.machines());
    let mut assigned = 0;
    for &p in feed {
        let ty = types.get(p);
        let (i, t) = policy.choose(ty);
        if policy.loads[i] + t > budget {
            break;
        }
        policy.loads[i] += t;
        schedule.place(ty, i);
        assigned += 1;
    }
    CappedRun { schedule, assigned }
}
