//! Adaptive inputs that force regret on any deterministic caching algorithm.
//!
//! Both constructions query the algorithm online: after a common prefix they
//! look at its cache and continue the input in whichever way hurts it.

use learnaug_core::Rational;

use crate::error::CachingError;
use crate::fitf::fitf_cost;
use crate::instance::{CacheHypothesisClass, PageId};
use crate::policy::CachePolicy;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversaryOutcome {
    /// Algorithm cost minus the cost of the adversary's offline solution.
    pub regret: Rational,
    pub alg_cost: u64,
    /// Cost of the solution the construction exhibits.
    pub offline_cost: u64,
    /// Exact optimum of the issued input (never above `offline_cost`).
    pub opt: u64,
    pub requests: Vec<PageId>,
    /// Index of the hypothesis equal to the issued input, if any.
    pub chosen_hypothesis: Option<usize>,
    /// Positions where the issued input deviates from the given prediction.
    pub mistakes: u64,
}

fn feed(alg: &mut dyn CachePolicy, issued: &mut Vec<PageId>, pages: &[PageId]) -> Result<(), CachingError> {
    for &p in pages {
        alg.serve(issued.len(), p)?;
        issued.push(p);
    }
    Ok(())
}

fn repeat(seq: &[PageId], times: usize) -> Vec<PageId> {
    seq.iter().copied().cycle().take(seq.len() * times).collect()
}

struct Blocks {
    a: Vec<PageId>,
    b: Vec<PageId>,
    /// `a^k b`
    prefix: Vec<PageId>,
    /// completes `σ_0 = a^k b a^{2k+1}`
    tail0: Vec<PageId>,
    /// completes `σ_1 = a^k b b^k b a^k`
    tail1: Vec<PageId>,
}

impl Blocks {
    fn new(k: usize) -> Self {
        let a: Vec<PageId> = (0..k).collect();
        let b: Vec<PageId> = (k..2 * k).collect();
        let mut prefix = repeat(&a, k);
        prefix.extend(&b);
        let tail0 = repeat(&a, 2 * k + 1);
        let mut tail1 = repeat(&b, k + 1);
        tail1.extend(repeat(&a, k));
        Blocks {
            a,
            b,
            prefix,
            tail0,
            tail1,
        }
    }

    fn block(&self, bit: bool) -> Vec<PageId> {
        let mut s = self.prefix.clone();
        s.extend(if bit { &self.tail1 } else { &self.tail0 });
        s
    }
}

/// The `ℓ` hypotheses built from blocks `σ_0`, `σ_1` over pages `0..2k`:
/// hypothesis `j` spells the `log2 ℓ` bits of `j`, most significant first.
pub fn block_class(k: usize, ell: usize) -> Result<CacheHypothesisClass, CachingError> {
    if k == 0 {
        return Err(CachingError::ZeroCache);
    }
    if !ell.is_power_of_two() {
        return Err(CachingError::NotPowerOfTwo("number of hypotheses"));
    }
    let bits = ell.trailing_zeros() as usize;
    let blocks = Blocks::new(k);
    let hyps = (0..ell)
        .map(|j| {
            (0..bits)
                .flat_map(|i| blocks.block((j >> (bits - 1 - i)) & 1 == 1))
                .collect()
        })
        .collect();
    CacheHypothesisClass::new(hyps, 2 * k)
}

/// Realizable lower bound: forces regret at least `(k/2) log2 ℓ`.
///
/// `make_alg` receives the hypothesis class and builds the algorithm under
/// test. After each common prefix `a^k b` the construction counts how many
/// pages of `a` the algorithm holds and completes the block it is least
/// prepared for.
pub fn adversary_realizable<'a, F>(k: usize, ell: usize, make_alg: F) -> Result<AdversaryOutcome, CachingError>
where
    F: FnOnce(&CacheHypothesisClass, usize) -> Box<dyn CachePolicy + 'a>,
{
    let class = block_class(k, ell)?;
    let blocks = Blocks::new(k);
    let mut alg = make_alg(&class, k);
    let bits = ell.trailing_zeros() as usize;
    let mut issued = Vec::new();
    let mut chosen = 0usize;
    // initial fill of `a`, then k+1 or 2k per block
    let mut offline = k as u64;
    for _ in 0..bits {
        feed(alg.as_mut(), &mut issued, &blocks.prefix)?;
        let n_i = alg.cache().iter().filter(|p| blocks.a.contains(p)).count();
        let bit = 2 * n_i >= k;
        chosen = (chosen << 1) | bit as usize;
        if bit {
            feed(alg.as_mut(), &mut issued, &blocks.tail1)?;
            offline += 2 * k as u64;
        } else {
            feed(alg.as_mut(), &mut issued, &blocks.tail0)?;
            offline += k as u64 + 1;
        }
    }
    debug_assert!(blocks.b.iter().all(|&p| p < 2 * k));
    let alg_cost = alg.cost();
    Ok(AdversaryOutcome {
        regret: Rational::from(alg_cost) - Rational::from(offline),
        alg_cost,
        offline_cost: offline,
        opt: fitf_cost(&issued, k),
        requests: issued,
        chosen_hypothesis: Some(chosen),
        mistakes: 0,
    })
}

/// The prediction `((1..k, 0) (2..k) (0, 1..k))^n` over pages `0..=k`.
pub fn error_prediction(k: usize, n: usize) -> Vec<PageId> {
    let mut it = Vec::new();
    it.extend(1..=k);
    it.push(0);
    it.extend(2..=k);
    it.push(0);
    it.extend(1..=k);
    repeat(&it, n)
}

/// Prediction-error lower bound: the real input deviates from the prediction
/// in at most one request per iteration, yet the algorithm pays one more than
/// the adversary in every iteration.
///
/// The adversary's solution holds `1..k` at the end of every iteration; from
/// the initially empty cache it pays `k + 2n` in total.
pub fn adversary_prediction_error<'a, F>(k: usize, n: usize, make_alg: F) -> Result<AdversaryOutcome, CachingError>
where
    F: FnOnce(&[PageId], usize) -> Box<dyn CachePolicy + 'a>,
{
    if k == 0 {
        return Err(CachingError::ZeroCache);
    }
    let prediction = error_prediction(k, n);
    let mut alg = make_alg(&prediction, k);
    let mut issued = Vec::new();
    let mut mistakes = 0u64;
    let mut first: Vec<PageId> = (1..=k).collect();
    first.push(0);
    let middle: Vec<PageId> = (2..=k).collect();
    let mut last = vec![0];
    last.extend(1..=k);
    for _ in 0..n {
        feed(alg.as_mut(), &mut issued, &first)?;
        if !alg.cache().contains(&1) {
            // the algorithm lacks page 1: request it where `k` was predicted
            let mut deviated: Vec<PageId> = (2..k).collect();
            deviated.push(1);
            if deviated != middle {
                mistakes += 1;
            }
            feed(alg.as_mut(), &mut issued, &deviated)?;
        } else {
            feed(alg.as_mut(), &mut issued, &middle)?;
        }
        feed(alg.as_mut(), &mut issued, &last)?;
    }
    let offline = if n == 0 { 0 } else { (k + 2 * n) as u64 };
    let alg_cost = alg.cost();
    Ok(AdversaryOutcome {
        regret: Rational::from(alg_cost) - Rational::from(offline),
        alg_cost,
        offline_cost: offline,
        opt: fitf_cost(&issued, k),
        requests: issued,
        chosen_hypothesis: None,
        mistakes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majority::MajorityPredictor;
    use crate::predictive::{PredictiveCache, ServeMode};
    use crate::policy::Lru;

    #[test]
    fn blocks_have_equal_length() {
        for k in 1..6 {
            let b = Blocks::new(k);
            assert_eq!(b.block(false).len(), b.block(true).len());
            assert_eq!(b.block(false).len(), 3 * k * k + 2 * k);
        }
    }

    #[test]
    fn class_rejects_non_power_of_two() {
        assert!(matches!(block_class(2, 3), Err(CachingError::NotPowerOfTwo(_))));
    }

    #[test]
    fn offline_block_costs() {
        let k = 3;
        let b = Blocks::new(k);
        assert_eq!(fitf_cost(&b.block(false), k), k as u64 + k as u64 + 1);
        assert!(fitf_cost(&b.block(true), k) <= 3 * k as u64);
    }

    #[test]
    fn lru_suffers_realizable_regret() {
        let out = adversary_realizable(2, 2, |_, k| Box::new(Lru::new(k))).unwrap();
        assert!(out.regret >= Rational::from(1u64));
        assert!(out.opt <= out.offline_cost);
    }

    #[test]
    fn majority_suffers_realizable_regret() {
        let out = adversary_realizable(2, 2, |class, k| {
            Box::new(PredictiveCache::new(k, MajorityPredictor::new(class.clone()), ServeMode::Realizable))
        })
        .unwrap();
        assert!(out.regret >= Rational::from(1u64));
        let class = block_class(2, 2).unwrap();
        assert_eq!(class.get(out.chosen_hypothesis.unwrap()), out.requests.as_slice());
    }

    #[test]
    fn prediction_error_against_lru() {
        let out = adversary_prediction_error(2, 1, |_, k| Box::new(Lru::new(k))).unwrap();
        assert!(out.alg_cost >= 2 + 3);
        assert_eq!(out.offline_cost, 2 + 2);
        assert!(out.mistakes <= 1);
        let out = adversary_prediction_error(3, 10, |_, k| Box::new(Lru::new(k))).unwrap();
        assert!(out.regret >= Rational::from(out.mistakes));
    }

    #[test]
    fn no_iterations_no_regret() {
        let out = adversary_prediction_error(3, 0, |_, k| Box::new(Lru::new(k))).unwrap();
        assert_eq!(out.regret, Rational::ZERO);
    }
}
