//! Seeded instance and hypothesis-class generators for the three tracks.
//!
//! Realizable generators embed the input in the class. Agnostic generators
//! perturb a copy of the input to hit a requested error of the best
//! hypothesis: Hamming edits for caching, transpositions of the optimal order
//! for scheduling, frequency reweighting for load balancing.

use learnaug_caching::{CacheHypothesisClass, CachingInstance, PageId};
use learnaug_core::{Rational, RngStream};
use learnaug_loadbalance::{exact_opt, hypothesis_error, ErrorPair, JobType, LbClass, LbClassFile, LbHypothesis, LbInstance, TypeSet};
use learnaug_nonclairvoyant::{sjf_opt, SchedClass, SchedInstance};
use serde_json::json;

use crate::error::HarnessError;

/// Feeds up to this length get their exact optimum computed.
pub const EXACT_OPT_CAP: usize = 12;

pub fn pick(rng: &mut RngStream, n: usize) -> usize {
    rng.uniform_index(n).expect("non-empty range")
}

pub fn random_pages(rng: &mut RngStream, len: usize, universe: usize) -> Vec<PageId> {
    (0..len).map(|_| pick(rng, universe)).collect()
}

#[derive(Clone, Debug)]
pub struct CachingSample {
    pub class: CacheHypothesisClass,
    pub instance: CachingInstance,
    /// Index of the embedded (or planted best) hypothesis.
    pub planted: usize,
}

impl CachingSample {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "problem": "caching",
            "k": self.instance.k,
            "universe_size": self.instance.universe_size,
            "requests": self.instance.requests,
            "hypotheses": self.class.iter().collect::<Vec<_>>(),
            "planted": self.planted,
        })
    }
}

fn check_caching(horizon: usize, universe: usize, ell: usize) -> Result<(), HarnessError> {
    if horizon == 0 || ell == 0 {
        return Err(HarnessError::Infeasible("empty horizon or class".into()));
    }
    if universe < 2 {
        return Err(HarnessError::Infeasible("universe needs at least two pages".into()));
    }
    Ok(())
}

/// `ell` uniformly random sequences; the input is one of them.
pub fn caching_realizable(rng: &mut RngStream, ell: usize, horizon: usize, universe: usize, k: usize) -> Result<CachingSample, HarnessError> {
    check_caching(horizon, universe, ell)?;
    let hyps: Vec<Vec<PageId>> = (0..ell).map(|_| random_pages(rng, horizon, universe)).collect();
    let planted = pick(rng, ell);
    let instance = CachingInstance::new(universe, k, hyps[planted].clone())?;
    Ok(CachingSample {
        class: CacheHypothesisClass::new(hyps, universe)?,
        instance,
        planted,
    })
}

/// A random input with a class whose best member differs from it in exactly
/// `mu` positions; every other member differs in `mu + horizon/4` (capped at
/// the horizon).
pub fn caching_planted(rng: &mut RngStream, ell: usize, horizon: usize, universe: usize, k: usize, mu: usize) -> Result<CachingSample, HarnessError> {
    check_caching(horizon, universe, ell)?;
    if mu > horizon {
        return Err(HarnessError::Infeasible(format!("mu {mu} exceeds horizon {horizon}")));
    }
    let truth = random_pages(rng, horizon, universe);
    let planted = pick(rng, ell);
    let mut hyps = Vec::with_capacity(ell);
    for i in 0..ell {
        let edits = if i == planted { mu } else { (mu + horizon / 4).min(horizon) };
        let mut h = truth.clone();
        let mut pos: Vec<usize> = (0..horizon).collect();
        rng.shuffle(&mut pos);
        for &p in &pos[..edits] {
            h[p] = (h[p] + 1 + pick(rng, universe - 1)) % universe;
        }
        hyps.push(h);
    }
    Ok(CachingSample {
        class: CacheHypothesisClass::new(hyps, universe)?,
        instance: CachingInstance::new(universe, k, truth)?,
        planted,
    })
}

#[derive(Clone, Debug)]
pub struct LbSample {
    pub class: LbClass,
    pub feed: Vec<usize>,
    pub planted: usize,
    /// Exact optimum when the feed is at most [`EXACT_OPT_CAP`] long.
    pub opt: Option<Rational>,
}

impl LbSample {
    fn finish(class: LbClass, feed: Vec<usize>, planted: usize) -> Result<Self, HarnessError> {
        let opt = if feed.len() <= EXACT_OPT_CAP {
            Some(exact_opt(&class.types, &feed)?)
        } else {
            None
        };
        Ok(LbSample { class, feed, planted, opt })
    }

    pub fn error(&self) -> Result<ErrorPair, HarnessError> {
        let truth = LbInstance::from_feed(&self.feed, self.class.types.len());
        Ok(hypothesis_error(&self.class.hypotheses[self.planted], &truth)?)
    }

    pub fn to_json(&self) -> Result<serde_json::Value, HarnessError> {
        let class: serde_json::Value =
            serde_json::from_str(&LbClassFile::from_class(&self.class).to_json()).map_err(|e| HarnessError::Config(e.to_string()))?;
        let jobs: Vec<&JobType> = self.feed.iter().map(|&p| self.class.types.get(p)).collect();
        Ok(json!({
            "problem": "loadbalance",
            "class": class,
            "jobs": jobs,
            "planted": self.planted,
            "opt": self.opt,
        }))
    }
}

fn random_types(rng: &mut RngStream, m: usize, tau: usize) -> Result<TypeSet, HarnessError> {
    let mut types = TypeSet::new(m, Vec::new())?;
    // distinct time vectors, integer times in 1..=4
    let mut guard = 0;
    while types.len() < tau {
        let times: Vec<Rational> = (0..m).map(|_| Rational::from(1 + pick(rng, 4))).collect();
        types.intern(JobType::unrelated(&times)?)?;
        guard += 1;
        if guard > 1000 {
            return Err(HarnessError::Infeasible(format!("{tau} distinct types on {m} machines")));
        }
    }
    Ok(types)
}

fn random_quarters(rng: &mut RngStream, tau: usize) -> Result<LbHypothesis, HarnessError> {
    let mut quarters = vec![0i128; tau];
    for _ in 0..4 {
        quarters[pick(rng, tau)] += 1;
    }
    Ok(LbHypothesis::new(
        quarters.iter().map(|&q| Rational::frac(q, 4)).collect(),
        Rational::frac(1, 4),
    )?)
}

/// `m` machines, `tau` types, `ell` hypotheses in multiples of 1/4; the
/// feed is a shuffled `scale`-fold copy of a random member.
pub fn lb_realizable(rng: &mut RngStream, m: usize, tau: usize, ell: usize, scale: u64) -> Result<LbSample, HarnessError> {
    if ell == 0 || tau == 0 || scale == 0 {
        return Err(HarnessError::Infeasible("empty class, type set or scale".into()));
    }
    let types = random_types(rng, m, tau)?;
    let hyps = (0..ell).map(|_| random_quarters(rng, tau)).collect::<Result<Vec<_>, _>>()?;
    let class = LbClass::new(types, hyps)?;
    let planted = pick(rng, ell);
    let mut feed = learnaug_loadbalance::scale_hypothesis(&class.hypotheses[planted], scale)?.jobs();
    rng.shuffle(&mut feed);
    LbSample::finish(class, feed, planted)
}

/// A class whose planted hypothesis is uniform over `tau ≥ 2` types and a
/// feed of `n` jobs whose error pair against it is `(alpha, beta)` within
/// ±10%. Type 0 is under-represented by `alpha`, type 1 over-represented by
/// `beta`, the rest share the remaining mass.
pub fn lb_error_target(
    rng: &mut RngStream,
    m: usize,
    tau: usize,
    ell: usize,
    alpha: Rational,
    beta: Rational,
    n: u64,
) -> Result<LbSample, HarnessError> {
    let infeasible = |why: &str| HarnessError::Infeasible(format!("(alpha, beta) = ({alpha}, {beta}): {why}"));
    if tau < 2 || ell == 0 || n == 0 {
        return Err(infeasible("needs two types, a hypothesis and a job"));
    }
    if alpha < Rational::ONE || beta < Rational::ONE {
        return Err(infeasible("error factors are at least 1"));
    }
    let t = Rational::from(tau);
    let f = t.recip()?;
    let low = f.checked_div(alpha)?;
    let high = f.checked_mul(beta)?;
    let rest_mass = Rational::ONE - low - high;
    let rest = if tau > 2 {
        rest_mass.checked_div(Rational::from(tau - 2))?
    } else if rest_mass.is_zero() {
        f
    } else {
        return Err(infeasible("two types need 1/alpha + beta = 2"));
    };
    if rest < low || rest > high {
        return Err(infeasible("remaining types leave the error window"));
    }
    let target: Vec<Rational> = (0..tau).map(|p| if p == 0 { low } else if p == 1 { high } else { rest }).collect();
    let mut counts: Vec<u64> = target
        .iter()
        .map(|&x| (x * Rational::from(n)).floor().max(1) as u64)
        .collect();
    // hand out the rounding remainder to the "rest" types first
    let mut total: u64 = counts.iter().sum();
    let mut p = 2 % tau;
    while total < n {
        counts[p] += 1;
        total += 1;
        p = if tau > 2 { 2 + (p - 1) % (tau - 2) } else { 1 - p };
    }
    let types = random_types(rng, m, tau)?;
    let uniform = LbHypothesis::new(vec![f; tau], f)?;
    let mut hyps = vec![uniform];
    for _ in 1..ell {
        hyps.push(random_quarters(rng, tau)?);
    }
    let planted = pick(rng, ell);
    hyps.swap(0, planted);
    let class = LbClass::new(types, hyps)?;
    let mut feed = LbInstance::new(counts).jobs();
    rng.shuffle(&mut feed);
    let sample = LbSample::finish(class, feed, planted)?;
    let err = sample.error()?;
    let within = |got: Rational, want: Rational| {
        got >= want * Rational::frac(9, 10) && got <= want * Rational::frac(11, 10)
    };
    if !within(err.alpha, alpha) || !within(err.beta, beta) {
        return Err(infeasible(&format!("rounding to {n} jobs gives ({}, {})", err.alpha, err.beta)));
    }
    Ok(sample)
}

/// A class of `ell` hypotheses over two types and a feed of `n` jobs drawn
/// from two further types no hypothesis predicts, so every hypothesis has
/// error `(n + 1, n + 1)`.
pub fn lb_disjoint(rng: &mut RngStream, m: usize, ell: usize, n: usize) -> Result<LbSample, HarnessError> {
    let mut types = random_types(rng, m, 2)?;
    let mut fresh = Vec::new();
    let mut guard = 0;
    while fresh.len() < 2 {
        let times: Vec<Rational> = (0..m).map(|_| Rational::from(1 + pick(rng, 4))).collect();
        let before = types.len();
        let id = types.intern(JobType::unrelated(&times)?)?;
        if id >= 2 && types.len() > before {
            fresh.push(id);
        }
        guard += 1;
        if guard > 1000 {
            return Err(HarnessError::Infeasible("no fresh types".into()));
        }
    }
    let hyps = (0..ell)
        .map(|_| {
            let h = random_quarters(rng, 2)?;
            let mut f = h.freqs;
            f.resize(4, Rational::ZERO);
            Ok(LbHypothesis::new(f, h.delta)?)
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let class = LbClass::new(types, hyps)?;
    let feed: Vec<usize> = (0..n).map(|_| fresh[pick(rng, 2)]).collect();
    LbSample::finish(class, feed, 0)
}

#[derive(Clone, Debug)]
pub struct SchedSample {
    pub class: SchedClass,
    pub instance: SchedInstance,
    pub planted: usize,
}

impl SchedSample {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "problem": "sched",
            "lengths": self.instance.lengths,
            "class": self.class,
            "planted": self.planted,
        })
    }
}

fn random_lengths(rng: &mut RngStream, n: usize) -> Vec<Rational> {
    (0..n).map(|_| Rational::frac(1 + pick(rng, 100) as i128, 100)).collect()
}

/// `ell` random length vectors (multiples of 1/100); the input is one of them.
pub fn sched_realizable(rng: &mut RngStream, ell: usize, n: usize) -> Result<SchedSample, HarnessError> {
    if ell == 0 || n == 0 {
        return Err(HarnessError::Infeasible("empty class or instance".into()));
    }
    let hyps: Vec<Vec<Rational>> = (0..ell).map(|_| random_lengths(rng, n)).collect();
    let planted = pick(rng, ell);
    let instance = SchedInstance::new(hyps[planted].clone())?;
    Ok(SchedSample {
        class: SchedClass::lengths(hyps, n)?,
        instance,
        planted,
    })
}

/// Two-length hypotheses (each job `lambda` or 1 with equal odds); the
/// input is one of them.
pub fn sched_two_length(rng: &mut RngStream, ell: usize, n: usize, lambda: Rational) -> Result<SchedSample, HarnessError> {
    if ell == 0 || n == 0 {
        return Err(HarnessError::Infeasible("empty class or instance".into()));
    }
    let hyps: Vec<Vec<Rational>> = (0..ell)
        .map(|_| (0..n).map(|_| if pick(rng, 2) == 0 { lambda } else { Rational::ONE }).collect())
        .collect();
    let planted = pick(rng, ell);
    let instance = SchedInstance::two_length(hyps[planted].clone(), lambda)?;
    Ok(SchedSample {
        class: SchedClass::lengths(hyps, n)?,
        instance,
        planted,
    })
}

/// Ordering hypotheses over random lengths: the planted one is the optimal
/// order with `swaps` random transpositions, the others uniform permutations.
pub fn sched_perms(rng: &mut RngStream, ell: usize, n: usize, swaps: usize) -> Result<SchedSample, HarnessError> {
    if ell == 0 || n < 2 {
        return Err(HarnessError::Infeasible("needs a hypothesis and two jobs".into()));
    }
    let instance = SchedInstance::new(random_lengths(rng, n))?;
    let (_, mut best) = sjf_opt(&instance);
    for _ in 0..swaps {
        let (a, b) = (pick(rng, n), pick(rng, n));
        best.swap(a, b);
    }
    let planted = pick(rng, ell);
    let hyps = (0..ell)
        .map(|i| {
            if i == planted {
                best.clone()
            } else {
                let mut h: Vec<usize> = (0..n).collect();
                rng.shuffle(&mut h);
                h
            }
        })
        .collect();
    Ok(SchedSample {
        class: SchedClass::perms(hyps, n)?,
        instance,
        planted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caching_realizable_embeds_truth() {
        let s = caching_realizable(&mut RngStream::new(1, 0), 4, 50, 10, 3).unwrap();
        assert_eq!(s.class.get(s.planted), s.instance.requests.as_slice());
        assert_eq!(s.class.best_mistakes(&s.instance.requests), 0);
    }

    #[test]
    fn caching_planted_hits_mu_exactly() {
        for seed in 0..20 {
            let s = caching_planted(&mut RngStream::new(seed, 0), 8, 100, 10, 5, 5).unwrap();
            assert_eq!(s.class.mistakes_of(s.planted, &s.instance.requests), 5);
            assert_eq!(s.class.best_mistakes(&s.instance.requests), 5);
        }
        assert!(caching_planted(&mut RngStream::new(0, 0), 2, 10, 4, 2, 11).is_err());
    }

    #[test]
    fn lb_error_target_within_ten_percent() {
        let s = lb_error_target(&mut RngStream::new(3, 0), 2, 3, 4, Rational::from(2u64), Rational::frac(3, 2), 60).unwrap();
        let e = s.error().unwrap();
        assert!(e.alpha >= Rational::frac(18, 10) && e.alpha <= Rational::frac(22, 10));
        assert!(e.beta >= Rational::frac(135, 100) && e.beta <= Rational::frac(165, 100));
        assert!(lb_error_target(&mut RngStream::new(3, 0), 2, 2, 1, Rational::from(3u64), Rational::from(3u64), 60).is_err());
    }

    #[test]
    fn lb_disjoint_is_maximally_wrong() {
        let s = lb_disjoint(&mut RngStream::new(5, 0), 3, 2, 8).unwrap();
        let e = s.error().unwrap();
        assert_eq!((e.alpha, e.beta), (Rational::from(9u64), Rational::from(9u64)));
        assert!(s.opt.is_some());
    }

    #[test]
    fn lb_realizable_counts_match() {
        let s = lb_realizable(&mut RngStream::new(2, 0), 2, 3, 4, 2).unwrap();
        assert_eq!(s.feed.len(), 8);
        let e = s.error().unwrap();
        assert_eq!((e.alpha, e.beta), (Rational::ONE, Rational::ONE));
    }

    #[test]
    fn sched_generators() {
        let s = sched_realizable(&mut RngStream::new(0, 0), 4, 10).unwrap();
        let SchedClass::Lengths(h) = &s.class else { panic!() };
        assert_eq!(h[s.planted], s.instance.lengths);
        let s = sched_two_length(&mut RngStream::new(0, 0), 2, 10, Rational::frac(1, 4)).unwrap();
        assert!(s.instance.lengths.iter().all(|&p| p == Rational::ONE || p == Rational::frac(1, 4)));
        let s = sched_perms(&mut RngStream::new(0, 0), 4, 10, 0).unwrap();
        let SchedClass::Perms(h) = &s.class else { panic!() };
        assert_eq!(h[s.planted], sjf_opt(&s.instance).1);
    }
}
