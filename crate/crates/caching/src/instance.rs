use serde::{Deserialize, Serialize};

use crate::error::CachingError;

/// Page identifier. Real pages are `0..universe_size`; the blank pages that
/// fill the initial cache are implicit and never requested.
pub type PageId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachingInstance {
    pub universe_size: usize,
    pub k: usize,
    pub requests: Vec<PageId>,
}

impl CachingInstance {
    pub fn new(universe_size: usize, k: usize, requests: Vec<PageId>) -> Result<Self, CachingError> {
        if k == 0 {
            return Err(CachingError::ZeroCache);
        }
        check_pages(&requests, universe_size)?;
        Ok(CachingInstance {
            universe_size,
            k,
            requests,
        })
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}

fn check_pages(seq: &[PageId], universe: usize) -> Result<(), CachingError> {
    match seq.iter().position(|&p| p >= universe) {
        Some(position) => Err(CachingError::PageOutOfRange {
            page: seq[position],
            position,
            universe,
        }),
        None => Ok(()),
    }
}

/// `ℓ` candidate request sequences of a common length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheHypothesisClass {
    hypotheses: Vec<Vec<PageId>>,
}

impl CacheHypothesisClass {
    pub fn new(hypotheses: Vec<Vec<PageId>>, universe: usize) -> Result<Self, CachingError> {
        let expected = hypotheses.first().ok_or(CachingError::EmptyClass)?.len();
        for (index, h) in hypotheses.iter().enumerate() {
            if h.len() != expected {
                return Err(CachingError::LengthMismatch {
                    index,
                    len: h.len(),
                    expected,
                });
            }
            check_pages(h, universe)?;
        }
        Ok(CacheHypothesisClass { hypotheses })
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.hypotheses[0].len()
    }

    pub fn get(&self, i: usize) -> &[PageId] {
        &self.hypotheses[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[PageId]> {
        self.hypotheses.iter().map(|h| h.as_slice())
    }

    /// Number of positions where hypothesis `i` differs from `requests`.
    pub fn mistakes_of(&self, i: usize, requests: &[PageId]) -> usize {
        self.hypotheses[i]
            .iter()
            .zip(requests)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Minimum Hamming distance to `requests` over the class.
    pub fn best_mistakes(&self, requests: &[PageId]) -> usize {
        (0..self.len())
            .map(|i| self.mistakes_of(i, requests))
            .min()
            .unwrap_or(0)
    }
}

/// On-disk form: `{k, universe_size, requests, hypotheses}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachingFile {
    pub k: usize,
    pub universe_size: usize,
    pub requests: Vec<PageId>,
    #[serde(default)]
    pub hypotheses: Vec<Vec<PageId>>,
}

impl CachingFile {
    pub fn from_json(text: &str) -> Result<Self, CachingError> {
        serde_json::from_str(text).map_err(|e| CachingError::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("caching file serializes")
    }

    pub fn instance(&self) -> Result<CachingInstance, CachingError> {
        CachingInstance::new(self.universe_size, self.k, self.requests.clone())
    }

    pub fn class(&self) -> Result<CacheHypothesisClass, CachingError> {
        CacheHypothesisClass::new(self.hypotheses.clone(), self.universe_size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_pages_and_zero_k() {
        assert_eq!(CachingInstance::new(3, 0, vec![]), Err(CachingError::ZeroCache));
        assert!(matches!(
            CachingInstance::new(3, 1, vec![0, 3]),
            Err(CachingError::PageOutOfRange { position: 1, .. })
        ));
    }

    #[test]
    fn class_lengths_must_agree() {
        assert!(matches!(
            CacheHypothesisClass::new(vec![vec![0, 1], vec![0]], 2),
            Err(CachingError::LengthMismatch { index: 1, .. })
        ));
        assert_eq!(CacheHypothesisClass::new(vec![], 2), Err(CachingError::EmptyClass));
    }

    #[test]
    fn file_round_trip() {
        let text = r#"{"k":2,"universe_size":3,"requests":[0,1,2],"hypotheses":[[0,1,2],[0,0,0]]}"#;
        let file = CachingFile::from_json(text).unwrap();
        assert_eq!(file.instance().unwrap().len(), 3);
        let class = file.class().unwrap();
        assert_eq!(class.best_mistakes(&file.requests), 0);
        assert_eq!(class.mistakes_of(1, &file.requests), 2);
        assert_eq!(CachingFile::from_json(&file.to_json()).unwrap(), file);
    }
}
