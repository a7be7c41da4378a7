//! Inequalities checked against measured runs.

use learnaug_core::{mean_stderr, Rational};
use serde::{Deserialize, Serialize};

/// One side of a checked inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Exact(Rational),
    Approx(f64),
}

impl Quantity {
    pub fn to_f64(self) -> f64 {
        match self {
            Quantity::Exact(r) => r.to_f64(),
            Quantity::Approx(x) => x,
        }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quantity::Exact(r) => write!(f, "{r}"),
            Quantity::Approx(x) => write!(f, "{x:.6}"),
        }
    }
}

/// `lhs ≤ rhs + slack · stderr`. Exact checks have zero slack and compare
/// rationals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    /// Identifier of the guarantee being tested.
    pub formula: String,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub slack: f64,
    pub stderr: f64,
    pub passed: bool,
}

/// Stderr multiplier of statistical checks.
pub const STAT_SLACK: f64 = 3.0;

impl BoundCheck {
    fn build(name: &str, formula: &str, lhs: Quantity, rhs: Quantity, slack: f64, stderr: f64) -> Self {
        let mut c = BoundCheck {
            name: name.to_string(),
            formula: formula.to_string(),
            lhs,
            rhs,
            slack,
            stderr,
            passed: false,
        };
        c.passed = c.evaluate();
        c
    }

    /// Exact rational comparison.
    pub fn exact(name: &str, formula: &str, lhs: Rational, rhs: Rational) -> Self {
        Self::build(name, formula, Quantity::Exact(lhs), Quantity::Exact(rhs), 0.0, 0.0)
    }

    /// Deterministic comparison involving irrational quantities.
    pub fn approx(name: &str, formula: &str, lhs: f64, rhs: f64) -> Self {
        Self::build(name, formula, Quantity::Approx(lhs), Quantity::Approx(rhs), 0.0, 0.0)
    }

    /// Sample mean against `rhs` with `3 · stderr` slack.
    pub fn mean_at_most(name: &str, formula: &str, samples: &[f64], rhs: f64) -> Self {
        let (mean, se) = mean_stderr(samples);
        Self::build(name, formula, Quantity::Approx(mean), Quantity::Approx(rhs), STAT_SLACK, se)
    }

    /// Two-sided: `|mean − target| ≤ 3 · stderr`.
    pub fn mean_near(name: &str, formula: &str, samples: &[f64], target: f64) -> Self {
        let (mean, se) = mean_stderr(samples);
        Self::build(name, formula, Quantity::Approx((mean - target).abs()), Quantity::Approx(0.0), STAT_SLACK, se)
    }

    /// `|observed − target| ≤ 3 · stderr` with a known standard error.
    pub fn near(name: &str, formula: &str, observed: f64, target: f64, stderr: f64) -> Self {
        Self::build(name, formula, Quantity::Approx((observed - target).abs()), Quantity::Approx(0.0), STAT_SLACK, stderr)
    }

    pub fn evaluate(&self) -> bool {
        match (self.lhs, self.rhs) {
            (Quantity::Exact(l), Quantity::Exact(r)) if self.slack == 0.0 => l <= r,
            (l, r) => l.to_f64() <= r.to_f64() + self.slack * self.stderr,
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_and_statistical() {
        assert!(BoundCheck::exact("a", "f", Rational::ONE, Rational::ONE).passed);
        assert!(!BoundCheck::exact("a", "f", Rational::from(2u64), Rational::ONE).passed);
        let c = BoundCheck::mean_at_most("m", "f", &[1.0, 3.0], 1.5);
        // mean 2, stderr 1
        assert!(c.passed);
        assert!(!BoundCheck::mean_at_most("m", "f", &[2.0, 2.0], 1.5).passed);
        assert!(BoundCheck::mean_near("n", "f", &[0.0, 2.0], 2.0).passed);
    }

    #[test]
    fn serde_round_trip() {
        let c = BoundCheck::exact("a", "f", Rational::frac(1, 3), Rational::ONE);
        let back: BoundCheck = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
