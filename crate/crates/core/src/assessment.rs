//! Customer-side scoring of individual providers.

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::catalog::{ensure_same_factors, FactorId};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProviderId(String);

impl ProviderId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProviderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.0)
    }
}

impl From<&str> for ProviderId {
    fn from(id: &str) -> Self {
        Self(id.to_owned())
    }
}

impl From<String> for ProviderId {
    fn from(id: String) -> Self {
        Self(id)
    }
}

/// A provider's exposure to one factor on the discrete 1–5 scale. Low means
/// mitigated exposure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Score(u8);

impl Score {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 5;

    pub fn new(value: i64) -> Result<Self> {
        if (i64::from(Self::MIN)..=i64::from(Self::MAX)).contains(&value) {
            Ok(Self(value as u8))
        } else {
            Err(Error::invariant(
                "assessment scores lie on the discrete 1-5 scale",
                format!("got {value}"),
            ))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0)
    }
}

impl TryFrom<i64> for Score {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Score> for u8 {
    fn from(score: Score) -> u8 {
        score.0
    }
}

/// Scores of one provider, one per factor, in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderAssessment {
    pub provider_id: ProviderId,
    scores: IndexMap<FactorId, Score>,
}

impl ProviderAssessment {
    pub fn new(
        provider_id: impl Into<ProviderId>,
        scores: impl IntoIterator<Item = (FactorId, Score)>,
    ) -> Result<Self> {
        let mut map = IndexMap::new();
        for (factor, score) in scores {
            if map.contains_key(&factor) {
                return Err(Error::DuplicateId {
                    kind: "factor",
                    id: factor.to_string(),
                });
            }
            map.insert(factor, score);
        }
        Ok(Self {
            provider_id: provider_id.into(),
            scores: map,
        })
    }

    /// Convenience constructor from raw integers.
    pub fn from_raw<'a>(
        provider_id: impl Into<ProviderId>,
        scores: impl IntoIterator<Item = (&'a str, i64)>,
    ) -> Result<Self> {
        let scores = scores
            .into_iter()
            .map(|(f, b)| Score::new(b).map(|s| (FactorId::from(f), s)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(provider_id, scores)
    }

    pub fn scores(&self) -> impl Iterator<Item = (&FactorId, Score)> {
        self.scores.iter().map(|(f, s)| (f, *s))
    }

    pub fn score(&self, factor: &str) -> Option<Score> {
        self.scores.get(factor).copied()
    }

    pub fn factor_ids(&self) -> impl Iterator<Item = &FactorId> {
        self.scores.keys()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Copy with some scores replaced. Every overridden factor must already
    /// be scored.
    pub fn with_overrides(
        &self,
        overrides: impl IntoIterator<Item = (FactorId, Score)>,
    ) -> Result<Self> {
        let mut next = self.clone();
        for (factor, score) in overrides {
            match next.scores.get_mut(&factor) {
                Some(slot) => *slot = score,
                None => {
                    return Err(Error::UnknownId {
                        kind: "factor",
                        id: factor.to_string(),
                    })
                }
            }
        }
        Ok(next)
    }

    /// Errors unless this assessment scores exactly the factors in `ids`.
    pub fn ensure_covers<'a>(&self, ids: impl IntoIterator<Item = &'a FactorId>) -> Result<()> {
        ensure_same_factors(ids, self.scores.keys())
    }
}
