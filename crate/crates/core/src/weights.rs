//! Factor weights derived from the mean factor scores.

use serde::{Deserialize, Serialize};

use crate::catalog::{ensure_unique, FactorId};
use crate::{Error, Result};

/// Stored weights must agree with `c / Σc` to this precision.
const WEIGHT_CONSISTENCY: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorWeight {
    pub factor_id: FactorId,
    /// Mean score `c_i` on the 0–10 scale.
    pub mean_score: f64,
    /// Normalized weight `α_i`; weights of a profile sum to 1.
    pub weight: f64,
}

/// Weights of every factor in the active catalog, in catalog order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightProfile {
    factors: Vec<FactorWeight>,
}

impl WeightProfile {
    /// Rebuilds a profile from stored `(c, α)` pairs, checking that `α`
    /// really is `c` normalized.
    pub fn from_parts(factors: Vec<FactorWeight>) -> Result<Self> {
        let means: Vec<(FactorId, f64)> = factors
            .iter()
            .map(|f| (f.factor_id.clone(), f.mean_score))
            .collect();
        let derived = normalize_weights(&means)?;
        for (stored, fresh) in factors.iter().zip(&derived.factors) {
            let drift = (stored.weight - fresh.weight).abs();
            if drift.is_nan() || drift > WEIGHT_CONSISTENCY {
                return Err(Error::invariant(
                    "factor weights equal normalized mean scores",
                    format!(
                        "factor `{}` stores weight {} but its mean score implies {}",
                        stored.factor_id, stored.weight, fresh.weight
                    ),
                ));
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[FactorWeight] {
        &self.factors
    }

    pub fn ids(&self) -> impl Iterator<Item = &FactorId> {
        self.factors.iter().map(|f| &f.factor_id)
    }

    pub fn get(&self, id: &str) -> Option<&FactorWeight> {
        self.factors.iter().find(|f| f.factor_id.as_str() == id)
    }

    /// Number of factors `m`.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Normalizes mean factor scores into weights: `α_i = c_i / Σ c`.
pub fn normalize_weights(means: &[(FactorId, f64)]) -> Result<WeightProfile> {
    if means.is_empty() {
        return Err(Error::Empty("mean factor scores"));
    }
    ensure_unique("factor", means.iter().map(|(id, _)| id.as_str()))?;
    if let Some((id, c)) = means.iter().find(|(_, c)| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::invariant(
            "mean factor scores are non-negative",
            format!("factor `{id}` has mean score {c}"),
        ));
    }
    let total: f64 = means.iter().map(|(_, c)| c).sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("every mean factor score is zero".into()));
    }
    let factors = means
        .iter()
        .map(|(id, c)| FactorWeight {
            factor_id: id.clone(),
            mean_score: *c,
            weight: c / total,
        })
        .collect();
    Ok(WeightProfile { factors })
}
