//! Instances, hypothesis classes and the completion-time bookkeeping shared
//! by all scheduling algorithms.

use learnaug_core::Rational;
use serde::{Deserialize, Serialize};

use crate::error::SchedError;

/// Job lengths, each in `(0, 1]` (two-length instances may also use 0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedInstance {
    pub lengths: Vec<Rational>,
}

impl SchedInstance {
    pub fn new(lengths: Vec<Rational>) -> Result<Self, SchedError> {
        if lengths.is_empty() {
            return Err(SchedError::Empty);
        }
        for (job, &p) in lengths.iter().enumerate() {
            if !p.is_positive() || p > Rational::ONE {
                return Err(SchedError::InvalidLength {
                    job,
                    value: p.to_string(),
                });
            }
        }
        Ok(SchedInstance { lengths })
    }

    /// An instance whose lengths are all `lambda` or 1, with `0 ≤ λ < 1`.
    pub fn two_length(lengths: Vec<Rational>, lambda: Rational) -> Result<Self, SchedError> {
        check_lambda(lambda)?;
        if lengths.is_empty() {
            return Err(SchedError::Empty);
        }
        for (job, &p) in lengths.iter().enumerate() {
            if p != lambda && p != Rational::ONE {
                return Err(SchedError::NotTwoLength {
                    job,
                    value: p.to_string(),
                    lambda: lambda.to_string(),
                });
            }
        }
        Ok(SchedInstance { lengths })
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self, SchedError> {
        let raw: SchedInstance = serde_json::from_str(text).map_err(|e| SchedError::Format(e.to_string()))?;
        SchedInstance::new(raw.lengths)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }
}

pub(crate) fn check_lambda(lambda: Rational) -> Result<(), SchedError> {
    if lambda.is_negative() || lambda >= Rational::ONE {
        return Err(SchedError::InvalidLambda(lambda.to_string()));
    }
    Ok(())
}

/// Hypotheses either give every job's length or an ordering of the jobs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "data", rename_all = "lowercase")]
pub enum SchedClass {
    /// `data[i][j]` is the length of job `j` under hypothesis `i`.
    Lengths(Vec<Vec<Rational>>),
    /// `data[i]` lists the jobs in the order hypothesis `i` proposes.
    Perms(Vec<Vec<usize>>),
}

impl SchedClass {
    pub fn lengths(hypotheses: Vec<Vec<Rational>>, n: usize) -> Result<Self, SchedError> {
        if hypotheses.is_empty() {
            return Err(SchedError::EmptyClass);
        }
        for (index, h) in hypotheses.iter().enumerate() {
            if h.len() != n {
                return Err(SchedError::Arity {
                    index,
                    len: h.len(),
                    expected: n,
                });
            }
            if let Some(job) = h.iter().position(|p| p.is_negative() || *p > Rational::ONE) {
                return Err(SchedError::InvalidLength {
                    job,
                    value: h[job].to_string(),
                });
            }
        }
        Ok(SchedClass::Lengths(hypotheses))
    }

    pub fn perms(hypotheses: Vec<Vec<usize>>, n: usize) -> Result<Self, SchedError> {
        if hypotheses.is_empty() {
            return Err(SchedError::EmptyClass);
        }
        for (index, h) in hypotheses.iter().enumerate() {
            if h.len() != n {
                return Err(SchedError::Arity {
                    index,
                    len: h.len(),
                    expected: n,
                });
            }
            if !is_permutation(h) {
                return Err(SchedError::NotPermutation(index));
            }
        }
        Ok(SchedClass::Perms(hypotheses))
    }

    pub fn len(&self) -> usize {
        match self {
            SchedClass::Lengths(h) => h.len(),
            SchedClass::Perms(h) => h.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parses and validates a class file for `n` jobs.
    pub fn from_json(text: &str, n: usize) -> Result<Self, SchedError> {
        let raw: SchedClass = serde_json::from_str(text).map_err(|e| SchedError::Format(e.to_string()))?;
        match raw {
            SchedClass::Lengths(h) => SchedClass::lengths(h, n),
            SchedClass::Perms(h) => SchedClass::perms(h, n),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("class serializes")
    }
}

pub fn is_permutation(order: &[usize]) -> bool {
    let mut seen = vec![false; order.len()];
    for &j in order {
        if j >= order.len() || std::mem::replace(&mut seen[j], true) {
            return false;
        }
    }
    true
}

/// Optimal total completion time and the shortest-first order (ties by index).
pub fn sjf_opt(instance: &SchedInstance) -> (Rational, Vec<usize>) {
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&a, &b| instance.lengths[a].cmp(&instance.lengths[b]).then(a.cmp(&b)));
    (order_cost(instance, &order), order)
}

/// Total completion time of running the jobs back to back in `order`.
pub fn order_cost(instance: &SchedInstance, order: &[usize]) -> Rational {
    let n = order.len();
    order
        .iter()
        .enumerate()
        .map(|(k, &j)| instance.lengths[j] * Rational::from(n - k))
        .sum()
}

/// Weight of the ordering mistakes of `order` over `pairs` (all pairs when
/// `None`): a pair whose longer job comes first costs the length difference.
pub fn mu_weight(instance: &SchedInstance, order: &[usize], pairs: Option<&[(usize, usize)]>) -> Rational {
    mu_over(&instance.lengths, order, pairs)
}

/// [`mu_weight`] over a raw length vector; only the lengths of jobs that
/// appear in `pairs` are read.
pub(crate) fn mu_over(p: &[Rational], order: &[usize], pairs: Option<&[(usize, usize)]>) -> Rational {
    let mut pos = vec![0usize; p.len()];
    for (k, &j) in order.iter().enumerate() {
        pos[j] = k;
    }
    let pair_weight = |i: usize, j: usize| {
        let (first, second) = if pos[i] < pos[j] { (i, j) } else { (j, i) };
        (p[first] - p[second]).pos_part()
    };
    match pairs {
        Some(pairs) => pairs.iter().map(|&(i, j)| pair_weight(i, j)).sum(),
        None => {
            let n = p.len();
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| pair_weight(i, j)).sum()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(ps: &[(i128, i128)]) -> SchedInstance {
        SchedInstance::new(ps.iter().map(|&(a, b)| Rational::frac(a, b)).collect()).unwrap()
    }

    #[test]
    fn sjf_examples() {
        assert_eq!(sjf_opt(&inst(&[(1, 5), (1, 2)])).0, Rational::frac(9, 10));
        assert_eq!(sjf_opt(&inst(&[(1, 3); 4])).0, Rational::frac(10, 3));
        assert_eq!(sjf_opt(&inst(&[(7, 8)])).0, Rational::frac(7, 8));
        assert_eq!(sjf_opt(&inst(&[(1, 2), (1, 5)])).1, vec![1, 0]);
    }

    #[test]
    fn mu_examples() {
        let i = inst(&[(1, 5), (1, 2)]);
        assert_eq!(mu_weight(&i, &[1, 0], None), Rational::frac(3, 10));
        assert_eq!(order_cost(&i, &[1, 0]) - sjf_opt(&i).0, Rational::frac(3, 10));
        assert_eq!(mu_weight(&i, &[0, 1], None), Rational::ZERO);
        let eq = inst(&[(1, 2); 3]);
        assert_eq!(mu_weight(&eq, &[2, 0, 1], None), Rational::ZERO);
    }

    #[test]
    fn validation() {
        assert!(SchedInstance::new(vec![Rational::ZERO]).is_err());
        assert!(SchedInstance::new(vec![Rational::frac(3, 2)]).is_err());
        assert!(SchedInstance::two_length(vec![Rational::ZERO, Rational::ONE], Rational::ZERO).is_ok());
        assert!(SchedInstance::two_length(vec![Rational::frac(1, 2)], Rational::frac(1, 4)).is_err());
        assert!(SchedClass::perms(vec![vec![0, 0]], 2).is_err());
        assert!(SchedClass::perms(vec![vec![1, 0]], 2).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let c = SchedClass::lengths(vec![vec![Rational::frac(1, 2), Rational::ONE]], 2).unwrap();
        let text = c.to_json();
        assert!(text.contains("\"variant\":\"lengths\""));
        assert_eq!(SchedClass::from_json(&text, 2).unwrap(), c);
        let i = inst(&[(1, 5), (1, 2)]);
        assert_eq!(SchedInstance::from_json(&i.to_json()).unwrap(), i);
    }
}
