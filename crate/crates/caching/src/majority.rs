//! Prediction streams and the realizable majority-vote predictor.

use std::collections::BTreeMap;

use crate::error::CachingError;
use crate::instance::{CacheHypothesisClass, PageId};

/// The predicted sequence together with the times it changed and the times
/// it was wrong.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CachePredictionStream {
    pub current_prediction: Vec<PageId>,
    pub switch_times: Vec<usize>,
    pub mistake_times: Vec<usize>,
}

impl CachePredictionStream {
    pub fn switches(&self) -> usize {
        self.switch_times.len()
    }

    pub fn mistakes(&self) -> usize {
        self.mistake_times.len()
    }
}

/// What the predictor did upon the arrival of one request.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PredictionStep {
    /// The prediction was (re)built before serving this request.
    pub changed: bool,
    /// The prediction used to serve this request was wrong.
    pub mistake: bool,
}

/// A predictor that maintains a full predicted request sequence. It is fed
/// `r_t` when it arrives and may rewrite `π_t..π_T` (never the served prefix).
pub trait CachePredictor {
    fn observe(&mut self, t: usize, request: PageId) -> Result<PredictionStep, CachingError>;

    fn stream(&self) -> &CachePredictionStream;

    fn prediction(&self) -> &[PageId] {
        &self.stream().current_prediction
    }

    /// True once no hypothesis is consistent with the input.
    fn exhausted(&self) -> bool {
        false
    }
}

/// Keeps the hypotheses consistent with the past and predicts, for every
/// future step, the page most of them agree on.
#[derive(Clone, Debug)]
pub struct MajorityPredictor {
    class: CacheHypothesisClass,
    active: Vec<usize>,
    stream: CachePredictionStream,
    history: Vec<PageId>,
    exhausted: bool,
    /// `|A|` right after every recomputation, starting with the initial one.
    active_sizes: Vec<usize>,
}

impl MajorityPredictor {
    pub fn new(class: CacheHypothesisClass) -> Self {
        let active = (0..class.len()).collect();
        MajorityPredictor {
            class,
            active,
            stream: CachePredictionStream::default(),
            history: Vec::new(),
            exhausted: false,
            active_sizes: Vec::new(),
        }
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn active_sizes(&self) -> &[usize] {
        &self.active_sizes
    }

    fn recompute(&mut self, t: usize) {
        let horizon = self.class.horizon();
        let history = &self.history;
        let class = &self.class;
        self.active
            .retain(|&i| class.get(i)[..=t].iter().zip(history).all(|(a, b)| a == b));
        if self.active.is_empty() {
            self.exhausted = true;
            return;
        }
        let prediction = &mut self.stream.current_prediction;
        prediction.resize(horizon, 0);
        prediction[t] = self.history[t];
        let mut votes: BTreeMap<PageId, usize> = BTreeMap::new();
        for tau in t + 1..horizon {
            votes.clear();
            for &i in &self.active {
                *votes.entry(self.class.get(i)[tau]).or_default() += 1;
            }
            // ascending ids, strict `>` keeps the smallest id among ties
            let mut best = (0usize, 0usize);
            for (&page, &count) in &votes {
                if count > best.1 {
                    best = (page, count);
                }
            }
            prediction[tau] = best.0;
        }
        self.active_sizes.push(self.active.len());
    }
}

impl CachePredictor for MajorityPredictor {
    fn observe(&mut self, t: usize, request: PageId) -> Result<PredictionStep, CachingError> {
        let horizon = self.class.horizon();
        if t >= horizon {
            return Err(CachingError::BeyondHorizon { t, horizon });
        }
        self.history.push(request);
        if t == 0 {
            self.recompute(0);
            if self.exhausted {
                self.stream.current_prediction = self.class.get(0).to_vec();
                self.stream.mistake_times.push(t);
                return Ok(PredictionStep {
                    changed: true,
                    mistake: true,
                });
            }
            return Ok(PredictionStep {
                changed: true,
                mistake: false,
            });
        }
        if self.stream.current_prediction[t] == request {
            return Ok(PredictionStep {
                changed: false,
                mistake: false,
            });
        }
        if !self.exhausted {
            self.recompute(t);
        }
        if self.exhausted {
            // frozen: the wrong prediction is kept and counted as a mistake
            self.stream.mistake_times.push(t);
            return Ok(PredictionStep {
                changed: false,
                mistake: true,
            });
        }
        self.stream.switch_times.push(t);
        Ok(PredictionStep {
            changed: true,
            mistake: false,
        })
    }

    fn stream(&self) -> &CachePredictionStream {
        &self.stream
    }

    fn exhausted(&self) -> bool {
        self.exhausted
    }
}
