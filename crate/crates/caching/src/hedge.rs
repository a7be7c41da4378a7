//! HEDGE over the hypotheses with a switching-minimal coupling between
//! consecutive distributions.
//!
//! Weights are powers of `1 - 1/k`, so after a few dozen mistakes they leave
//! the 128-bit range; this module keeps them as arbitrary-precision rationals
//! to stay exact.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use learnaug_core::RngStream;

use crate::error::CachingError;
use crate::instance::{CacheHypothesisClass, PageId};
use crate::majority::{CachePredictionStream, CachePredictor, PredictionStep};

pub type Prob = BigRational;

fn ratio(n: i64, d: i64) -> Prob {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HedgeState {
    pub weights: Vec<Prob>,
    pub distribution: Vec<Prob>,
    /// `exp(-eta)`, kept as the exact rational `1 - 1/k`.
    pub decay: Prob,
    pub current_index: usize,
}

impl HedgeState {
    /// Uniform weights with learning rate `ln(1/(1-1/k))`.
    pub fn new(ell: usize, k: usize, current_index: usize) -> Self {
        assert!(ell >= 1 && k >= 1);
        let weights = vec![Prob::one(); ell];
        let distribution = vec![ratio(1, ell as i64); ell];
        HedgeState {
            weights,
            distribution,
            decay: Prob::one() - ratio(1, k as i64),
            current_index,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The learning rate as a float, for reports.
    pub fn eta(&self) -> f64 {
        -self.decay.to_f64().unwrap_or(0.0).ln()
    }
}

/// Multiplies the weight of every mistaken hypothesis by `exp(-eta)` and
/// renormalizes.
pub fn hedge_update(state: &HedgeState, mistaken: &[usize]) -> HedgeState {
    let mut next = state.clone();
    if mistaken.is_empty() {
        return next;
    }
    for &i in mistaken {
        next.weights[i] = &next.weights[i] * &next.decay;
    }
    // Rescale so the largest weight is 1; the distribution is unchanged.
    let max = next.weights.iter().max().cloned().expect("non-empty");
    if max.is_zero() {
        // k = 1 zeroes every mistaken weight; all of them wrong changes nothing
        return state.clone();
    }
    for w in next.weights.iter_mut() {
        *w = &*w / &max;
    }
    let total: Prob = next.weights.iter().fold(Prob::zero(), |a, w| a + w);
    next.distribution = next.weights.iter().map(|w| w / &total).collect();
    next
}

/// `max(0, x)`.
fn pos(x: &Prob) -> Prob {
    if x.is_positive() {
        x.clone()
    } else {
        Prob::zero()
    }
}

pub fn total_variation(prev: &[Prob], next: &[Prob]) -> Prob {
    prev.iter().zip(next).map(|(a, b)| pos(&(b - a))).fold(Prob::zero(), |a, b| a + b)
}

/// The min-cost flow `f_ij = (-δ_i)^+ δ_j^+ / Σ_m δ_m^+` with `δ = next - prev`.
pub fn coupling_flow(prev: &[Prob], next: &[Prob]) -> Vec<Vec<Prob>> {
    let delta: Vec<Prob> = prev.iter().zip(next).map(|(a, b)| b - a).collect();
    let mass = delta.iter().map(pos).fold(Prob::zero(), |a, b| a + b);
    let n = prev.len();
    let mut flow = vec![vec![Prob::zero(); n]; n];
    if mass.is_zero() {
        return flow;
    }
    for i in 0..n {
        let out = pos(&-delta[i].clone());
        if out.is_zero() {
            continue;
        }
        for j in 0..n {
            if delta[j].is_positive() {
                flow[i][j] = &out * &delta[j] / &mass;
            }
        }
    }
    flow
}

/// Transition probabilities out of `current`: switch to `j` with
/// `f_ij / prev_i`, stay with the rest.
pub fn transition_row(prev: &[Prob], next: &[Prob], current: usize) -> Result<Vec<Prob>, CachingError> {
    if !prev[current].is_positive() {
        return Err(CachingError::ImpossibleState(current));
    }
    let flow = coupling_flow(prev, next);
    let mut row: Vec<Prob> = flow[current].iter().map(|f| f / &prev[current]).collect();
    let leave = row.iter().fold(Prob::zero(), |a, b| a + b);
    row[current] = Prob::one() - leave;
    Ok(row)
}

/// Draws an index from an exact rational distribution.
pub fn sample_exact(probs: &[Prob], rng: &mut RngStream) -> usize {
    let mut den = BigInt::one();
    for p in probs {
        den = num_integer::Integer::lcm(&den, p.denom());
    }
    let den_u: BigUint = den.to_biguint().expect("positive denominator");
    let u: BigInt = BigInt::from(rng.gen_biguint_below(&den_u));
    let mut acc = BigInt::zero();
    for (i, p) in probs.iter().enumerate() {
        acc += p.numer() * (&den / p.denom());
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|p| p.is_positive()).unwrap_or(0)
}

/// Moves from `current` (a sample of `prev`) to a sample of `next`, switching
/// with total probability `TVD(prev, next)`.
pub fn coupling_sample(
    prev: &[Prob],
    next: &[Prob],
    current: usize,
    rng: &mut RngStream,
) -> Result<(usize, bool), CachingError> {
    let row = transition_row(prev, next, current)?;
    if row[current].is_one() {
        return Ok((current, false));
    }
    let j = sample_exact(&row, rng);
    Ok((j, j != current))
}

/// Agnostic predictor: follows the hypothesis sampled by HEDGE, moving
/// between hypotheses through the coupling.
#[derive(Clone, Debug)]
pub struct HedgePredictor {
    class: CacheHypothesisClass,
    state: HedgeState,
    rng: RngStream,
    stream: CachePredictionStream,
    last_request: Option<PageId>,
    /// Σ_t TVD(ξ^{t-1}, ξ^t) accumulated so far.
    tvd_sum: Prob,
}

impl HedgePredictor {
    pub fn new(class: CacheHypothesisClass, k: usize, mut rng: RngStream) -> Self {
        let ell = class.len();
        let start = rng.uniform_index(ell).expect("non-empty class");
        let stream = CachePredictionStream {
            current_prediction: class.get(start).to_vec(),
            ..Default::default()
        };
        HedgePredictor {
            state: HedgeState::new(ell, k, start),
            class,
            rng,
            stream,
            last_request: None,
            tvd_sum: Prob::zero(),
        }
    }

    pub fn state(&self) -> &HedgeState {
        &self.state
    }

    pub fn expected_switches(&self) -> f64 {
        self.tvd_sum.to_f64().unwrap_or(f64::NAN)
    }
}

impl CachePredictor for HedgePredictor {
    fn observe(&mut self, t: usize, request: PageId) -> Result<PredictionStep, CachingError> {
        let horizon = self.class.horizon();
        if t >= horizon {
            return Err(CachingError::BeyondHorizon { t, horizon });
        }
        let mut changed = t == 0;
        if let Some(prev_request) = self.last_request {
            let mistaken: Vec<usize> = (0..self.class.len())
                .filter(|&i| self.class.get(i)[t - 1] != prev_request)
                .collect();
            let next = hedge_update(&self.state, &mistaken);
            self.tvd_sum += total_variation(&self.state.distribution, &next.distribution);
            let (j, switched) = coupling_sample(
                &self.state.distribution,
                &next.distribution,
                self.state.current_index,
                &mut self.rng,
            )?;
            self.state = next;
            self.state.current_index = j;
            if switched {
                self.stream.current_prediction[t..].copy_from_slice(&self.class.get(j)[t..]);
                self.stream.switch_times.push(t);
                changed = true;
            }
        }
        self.last_request = Some(request);
        let mistake = self.stream.current_prediction[t] != request;
        if mistake {
            self.stream.mistake_times.push(t);
        }
        Ok(PredictionStep { changed, mistake })
    }

    fn stream(&self) -> &CachePredictionStream {
        &self.stream
    }
}
