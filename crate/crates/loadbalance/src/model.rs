//! Job types, frequency hypotheses, instances and schedules.

use serde::{Deserialize, Serialize};

use learnaug_core::Rational;

use crate::error::LbError;

/// Processing times of one job type on each machine; `None` means the job
/// cannot run there.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JobType {
    times: Vec<Option<Rational>>,
}

impl JobType {
    pub fn new(times: Vec<Option<Rational>>) -> Result<Self, LbError> {
        if times.is_empty() {
            return Err(LbError::NoMachines);
        }
        if times.iter().flatten().any(|t| !t.is_positive()) {
            return Err(LbError::NonPositiveTime);
        }
        if times.iter().all(Option::is_none) {
            return Err(LbError::Unschedulable(0));
        }
        Ok(JobType { times })
    }

    /// Unrestricted type with the given times.
    pub fn unrelated(times: &[Rational]) -> Result<Self, LbError> {
        Self::new(times.iter().map(|&t| Some(t)).collect())
    }

    /// Restricted-assignment type: unit time on `allowed`, unavailable elsewhere.
    pub fn restricted(m: usize, allowed: impl Fn(usize) -> bool) -> Result<Self, LbError> {
        Self::new((0..m).map(|i| allowed(i).then_some(Rational::ONE)).collect())
    }

    pub fn machines(&self) -> usize {
        self.times.len()
    }

    pub fn time(&self, machine: usize) -> Option<Rational> {
        self.times[machine]
    }

    pub fn times(&self) -> &[Option<Rational>] {
        &self.times
    }

    /// Fastest machine (smallest index among ties) and its time.
    pub fn fastest(&self) -> (usize, Rational) {
        self.times
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (i, t)))
            .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("validated non-empty")
    }

    pub fn min_time(&self) -> Rational {
        self.fastest().1
    }
}

impl Serialize for JobType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self
            .times
            .iter()
            .map(|t| t.map_or_else(|| "inf".to_string(), |t| t.to_string()))
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for JobType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        let times = raw
            .iter()
            .map(|s| match s.trim() {
                "inf" | "Infinity" | "∞" => Ok(None),
                other => other.parse::<Rational>().map(Some),
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        JobType::new(times).map_err(serde::de::Error::custom)
    }
}

/// A type universe shared by a hypothesis class, its scalings and the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSet {
    m: usize,
    types: Vec<JobType>,
}

impl TypeSet {
    pub fn new(m: usize, types: Vec<JobType>) -> Result<Self, LbError> {
        if m == 0 {
            return Err(LbError::NoMachines);
        }
        for t in &types {
            if t.machines() != m {
                return Err(LbError::Arity {
                    got: t.machines(),
                    expected: m,
                });
            }
        }
        Ok(TypeSet { m, types })
    }

    pub fn machines(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn get(&self, p: usize) -> &JobType {
        &self.types[p]
    }

    pub fn iter(&self) -> impl Iterator<Item = &JobType> {
        self.types.iter()
    }

    /// Index of `ty`, appending it if new.
    pub fn intern(&mut self, ty: JobType) -> Result<usize, LbError> {
        if ty.machines() != self.m {
            return Err(LbError::Arity {
                got: ty.machines(),
                expected: self.m,
            });
        }
        if let Some(i) = self.types.iter().position(|t| *t == ty) {
            return Ok(i);
        }
        self.types.push(ty);
        Ok(self.types.len() - 1)
    }
}

/// Frequencies `f_p` over the type universe, each a multiple of `δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LbHypothesis {
    pub freqs: Vec<Rational>,
    pub delta: Rational,
}

impl LbHypothesis {
    pub fn new(freqs: Vec<Rational>, delta: Rational) -> Result<Self, LbError> {
        let total: Rational = freqs.iter().sum();
        if total != Rational::ONE {
            return Err(LbError::FrequencySum(total.to_string()));
        }
        for (ty, f) in freqs.iter().enumerate() {
            if f.is_negative() || !f.checked_div(delta)?.is_integer() {
                return Err(LbError::Granularity {
                    ty,
                    freq: f.to_string(),
                    delta: delta.to_string(),
                });
            }
        }
        Ok(LbHypothesis { freqs, delta })
    }

    /// Types with non-zero frequency.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.freqs.iter().enumerate().filter(|(_, f)| f.is_positive()).map(|(p, _)| p)
    }
}

/// Job counts `n_p` per type.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LbInstance {
    pub counts: Vec<u64>,
}

impl LbInstance {
    pub fn new(counts: Vec<u64>) -> Self {
        LbInstance { counts }
    }

    /// Counts of an arrival sequence of type indices.
    pub fn from_feed(feed: &[usize], types: usize) -> Self {
        let mut counts = vec![0u64; types];
        for &p in feed {
            counts[p] += 1;
        }
        LbInstance { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn get(&self, p: usize) -> u64 {
        self.counts.get(p).copied().unwrap_or(0)
    }

    /// Every type appears at least as often here as in `arrived`.
    pub fn subsumes(&self, arrived: &[u64]) -> bool {
        arrived.iter().enumerate().all(|(p, &a)| self.get(p) >= a)
    }

    /// Jobs listed type by type, the order used by schedules of instances.
    pub fn jobs(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(p, &n)| std::iter::repeat_n(p, n as usize))
            .collect()
    }
}

/// `H(h)`: `h f_p / δ` jobs of every type `p`.
pub fn scale_hypothesis(h: &LbHypothesis, factor: u64) -> Result<LbInstance, LbError> {
    if factor == 0 {
        return Err(LbError::ZeroScaling);
    }
    let counts = h
        .freqs
        .iter()
        .enumerate()
        .map(|(ty, f)| {
            let q = f.checked_div(h.delta)?.checked_mul(Rational::from(factor))?;
            if !q.is_integer() {
                return Err(LbError::Granularity {
                    ty,
                    freq: f.to_string(),
                    delta: h.delta.to_string(),
                });
            }
            Ok(q.numer() as u64)
        })
        .collect::<Result<Vec<_>, LbError>>()?;
    Ok(LbInstance { counts })
}

/// Assignment of jobs to machines with the resulting loads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub assignment: Vec<usize>,
    pub loads: Vec<Rational>,
    pub makespan: Rational,
}

impl Schedule {
    pub fn empty(m: usize) -> Self {
        Schedule {
            assignment: Vec::new(),
            loads: vec![Rational::ZERO; m],
            makespan: Rational::ZERO,
        }
    }

    /// Places a job of type `ty` on `machine`; the machine must be allowed.
    pub fn place(&mut self, ty: &JobType, machine: usize) {
        let t = ty.time(machine).expect("job placed on a forbidden machine");
        self.assignment.push(machine);
        self.loads[machine] += t;
        if self.loads[machine] > self.makespan {
            self.makespan = self.loads[machine];
        }
    }

    /// Recomputes loads from scratch and checks them against the stored ones.
    pub fn verify(&self, types: &TypeSet, jobs: &[usize]) -> bool {
        if jobs.len() != self.assignment.len() {
            return false;
        }
        let mut loads = vec![Rational::ZERO; types.machines()];
        for (&p, &i) in jobs.iter().zip(&self.assignment) {
            match types.get(p).time(i) {
                Some(t) => loads[i] += t,
                None => return false,
            }
        }
        let makespan = loads.iter().copied().max().unwrap_or(Rational::ZERO);
        loads == self.loads && makespan == self.makespan
    }
}

/// Multiplicative over- and under-estimation of the true frequencies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPair {
    pub alpha: Rational,
    pub beta: Rational,
}

impl ErrorPair {
    pub fn product(&self) -> Rational {
        self.alpha * self.beta
    }
}

/// `α = max f_p / f*_p`, `β = max f*_p / f_p`, each `n + 1` when a type is
/// predicted but absent (resp. present but not predicted).
pub fn hypothesis_error(h: &LbHypothesis, truth: &LbInstance) -> Result<ErrorPair, LbError> {
    let n = truth.total();
    if n == 0 {
        return Err(LbError::EmptyInstance);
    }
    let cap = Rational::from(n + 1);
    let types = h.freqs.len().max(truth.counts.len());
    let mut alpha = Rational::ZERO;
    let mut beta = Rational::ZERO;
    let mut alpha_inf = false;
    let mut beta_inf = false;
    for p in 0..types {
        let f = h.freqs.get(p).copied().unwrap_or(Rational::ZERO);
        let star = Rational::new(truth.get(p) as i128, n as i128)?;
        match (f.is_zero(), star.is_zero()) {
            (false, true) => alpha_inf = true,
            (true, false) => beta_inf = true,
            (false, false) => {
                alpha = alpha.max(f.checked_div(star)?);
                beta = beta.max(star.checked_div(f)?);
            }
            (true, true) => {}
        }
    }
    Ok(ErrorPair {
        alpha: if alpha_inf { cap } else { alpha },
        beta: if beta_inf { cap } else { beta },
    })
}

/// A class of frequency hypotheses over a shared type universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LbClass {
    pub types: TypeSet,
    pub hypotheses: Vec<LbHypothesis>,
}

impl LbClass {
    pub fn new(types: TypeSet, hypotheses: Vec<LbHypothesis>) -> Result<Self, LbError> {
        if hypotheses.is_empty() {
            return Err(LbError::EmptyClass);
        }
        for h in &hypotheses {
            if h.freqs.len() != types.len() {
                return Err(LbError::Arity {
                    got: h.freqs.len(),
                    expected: types.len(),
                });
            }
        }
        Ok(LbClass { types, hypotheses })
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn machines(&self) -> usize {
        self.types.machines()
    }

    /// Types predicted by no hypothesis.
    pub fn never_predicted(&self) -> Vec<bool> {
        (0..self.types.len())
            .map(|p| self.hypotheses.iter().all(|h| h.freqs[p].is_zero()))
            .collect()
    }

    /// The pair `(α, β)` of the hypothesis minimizing `αβ`, with its index.
    pub fn class_error(&self, truth: &LbInstance) -> Result<(usize, ErrorPair), LbError> {
        let mut best: Option<(usize, ErrorPair)> = None;
        for (i, h) in self.hypotheses.iter().enumerate() {
            let e = hypothesis_error(h, truth)?;
            if best.is_none_or(|(_, b)| e.product() < b.product()) {
                best = Some((i, e));
            }
        }
        Ok(best.expect("non-empty class"))
    }
}

#[derive(Serialize, Deserialize)]
struct FreqEntry {
    p: JobType,
    f: Rational,
}

#[derive(Serialize, Deserialize)]
struct HypothesisEntry {
    freqs: Vec<FreqEntry>,
}

/// On-disk class: `{m, delta, hypotheses: [{freqs: [{p, f}]}], extra_types}`.
/// The type universe is every `p` in order of first appearance followed by
/// `extra_types`; feeds refer to types by that index.
#[derive(Serialize, Deserialize)]
pub struct LbClassFile {
    m: usize,
    delta: Rational,
    hypotheses: Vec<HypothesisEntry>,
    #[serde(default)]
    extra_types: Vec<JobType>,
}

impl LbClassFile {
    pub fn from_json(text: &str) -> Result<LbClass, LbError> {
        let file: LbClassFile = serde_json::from_str(text).map_err(|e| LbError::Format(e.to_string()))?;
        file.into_class()
    }

    pub fn into_class(self) -> Result<LbClass, LbError> {
        let mut types = TypeSet::new(self.m, Vec::new())?;
        let mut raw = Vec::new();
        for h in &self.hypotheses {
            let mut entries = Vec::new();
            for e in &h.freqs {
                entries.push((types.intern(e.p.clone())?, e.f));
            }
            raw.push(entries);
        }
        for t in self.extra_types {
            types.intern(t)?;
        }
        let hypotheses = raw
            .into_iter()
            .map(|entries| {
                let mut freqs = vec![Rational::ZERO; types.len()];
                for (p, f) in entries {
                    freqs[p] += f;
                }
                LbHypothesis::new(freqs, self.delta)
            })
            .collect::<Result<Vec<_>, _>>()?;
        LbClass::new(types, hypotheses)
    }

    pub fn from_class(class: &LbClass) -> Self {
        let delta = class.hypotheses[0].delta;
        let hypotheses = class
            .hypotheses
            .iter()
            .map(|h| HypothesisEntry {
                freqs: h
                    .support()
                    .map(|p| FreqEntry {
                        p: class.types.get(p).clone(),
                        f: h.freqs[p],
                    })
                    .collect(),
            })
            .collect();
        LbClassFile {
            m: class.machines(),
            delta,
            hypotheses,
            extra_types: class.types.iter().cloned().collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("class serializes")
    }
}
