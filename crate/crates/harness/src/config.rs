//! Experiment configuration: a JSON file whose fields can be overridden from
//! the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use learnaug_core::{Problem, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::HarnessError;

/// Inclusive seed range written `a..b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

impl SeedRange {
    pub fn new(start: u64, end: u64) -> Result<Self, HarnessError> {
        if end < start {
            return Err(HarnessError::Config(format!("empty seed range {start}..{end}")));
        }
        Ok(SeedRange { start, end })
    }

    pub fn count(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn seeds(&self) -> Vec<u64> {
        (self.start..=self.end).collect()
    }
}

impl FromStr for SeedRange {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HarnessError::Config(format!("seed range {s:?} is not of the form a..b"));
        match s.split_once("..") {
            Some((a, b)) => SeedRange::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let x: u64 = s.trim().parse().map_err(|_| bad())?;
                SeedRange::new(x, x)
            }
        }
    }
}

impl fmt::Display for SeedRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl Serialize for SeedRange {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SeedRange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Suite parameters; anything left unset takes the suite's default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub k: Option<Vec<usize>>,
    pub ell: Option<Vec<usize>>,
    pub n: Option<Vec<usize>>,
    pub m: Option<Vec<usize>>,
    /// Request-sequence length.
    pub horizon: Option<usize>,
    pub universe: Option<usize>,
    pub mu: Option<Vec<usize>>,
    pub lambda: Option<Vec<Rational>>,
    pub delta_conf: Option<f64>,
    pub delta_speed: Option<Vec<Rational>>,
    pub c: Option<u64>,
    pub algo: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Jsonl,
    #[default]
    Summary,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" => Ok(ReportFormat::Jsonl),
            "summary" => Ok(ReportFormat::Summary),
            other => Err(HarnessError::Config(format!("unknown report format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    #[serde(default)]
    pub problem: Option<Problem>,
    #[serde(default)]
    pub seeds: Option<SeedRange>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<ReportFormat>,
}

impl ExperimentConfig {
    pub fn new(suite: &str) -> Self {
        ExperimentConfig {
            suite: suite.to_string(),
            problem: None,
            seeds: None,
            params: Params::default(),
            output: None,
            format: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn with_seeds(mut self, seeds: SeedRange) -> Self {
        self.seeds = Some(seeds);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        let r: SeedRange = "0..49".parse().unwrap();
        assert_eq!(r.count(), 50);
        assert_eq!("7".parse::<SeedRange>().unwrap().seeds(), vec![7]);
        assert!("5..2".parse::<SeedRange>().is_err());
        assert!("x".parse::<SeedRange>().is_err());
    }

    #[test]
    fn config_json() {
        let c = ExperimentConfig::from_json(r#"{"suite":"caching-realizable","seeds":"0..3","params":{"ell":[2,4],"lambda":["1/4"]}}"#).unwrap();
        assert_eq!(c.seeds.unwrap().count(), 4);
        assert_eq!(c.params.ell, Some(vec![2, 4]));
        assert_eq!(c.params.lambda, Some(vec![Rational::frac(1, 4)]));
        assert!(ExperimentConfig::from_json(r#"{"suite":"x","bogus":1}"#).is_err());
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
