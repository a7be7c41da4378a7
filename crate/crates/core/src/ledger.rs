//! Per-run cost ledgers and their aggregation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Caching,
    Loadbalance,
    Sched,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Caching => "caching",
            Problem::Loadbalance => "loadbalance",
            Problem::Sched => "sched",
        })
    }
}

impl std::str::FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "caching" => Ok(Problem::Caching),
            "loadbalance" | "lb" => Ok(Problem::Loadbalance),
            "sched" | "scheduling" | "nonclairvoyant" => Ok(Problem::Sched),
            other => Err(format!("unknown problem {other:?}")),
        }
    }
}

/// Cost ledger of one algorithm execution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: Problem,
    pub objective: Rational,
    pub opt: Rational,
    pub switches: u64,
    /// Count for caching, inversion weight for scheduling.
    pub mistakes: Rational,
    pub seed: u64,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

impl RunRecord {
    pub fn new(problem: Problem, objective: Rational, opt: Rational) -> Self {
        RunRecord {
            problem,
            objective,
            opt,
            switches: 0,
            mistakes: Rational::ZERO,
            seed: 0,
            meta: BTreeMap::new(),
        }
    }

    pub fn regret(&self) -> Rational {
        self.objective - self.opt
    }

    /// `objective / opt`, or `None` when `opt` is zero.
    pub fn ratio(&self) -> Option<Rational> {
        if self.opt.is_zero() {
            None
        } else {
            Some(self.objective / self.opt)
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.insert(key.to_string(), value.to_string());
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: Rational,
    pub max: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub problem: Problem,
    pub count: usize,
    pub objective: MetricSummary,
    pub opt: MetricSummary,
    pub switches: MetricSummary,
    pub mistakes: MetricSummary,
    pub regret: MetricSummary,
}

fn summarize(values: impl Iterator<Item = Rational> + Clone, count: usize) -> MetricSummary {
    let total: Rational = values.clone().sum();
    let max = values.max().unwrap_or(Rational::ZERO);
    MetricSummary {
        mean: total / Rational::from(count),
        max,
    }
}

/// Exact means and elementwise maxima over a homogeneous list of records.
pub fn ledger_merge(records: &[RunRecord]) -> Result<LedgerSummary, CoreError> {
    let first = records.first().ok_or(CoreError::EmptyLedger)?;
    if let Some(other) = records.iter().find(|r| r.problem != first.problem) {
        return Err(CoreError::MixedProblems(
            first.problem.to_string(),
            other.problem.to_string(),
        ));
    }
    let n = records.len();
    Ok(LedgerSummary {
        problem: first.problem,
        count: n,
        objective: summarize(records.iter().map(|r| r.objective), n),
        opt: summarize(records.iter().map(|r| r.opt), n),
        switches: summarize(records.iter().map(|r| Rational::from(r.switches)), n),
        mistakes: summarize(records.iter().map(|r| r.mistakes), n),
        regret: summarize(records.iter().map(|r| r.regret()), n),
    })
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
