//! Integral provider risk and its per-factor breakdown.

use serde::{Deserialize, Serialize};

use crate::assessment::{ProviderAssessment, ProviderId};
use crate::catalog::FactorId;
use crate::weights::WeightProfile;
use crate::{Error, Result};

/// Weight, relevance and contribution of one factor to a provider's risk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorBreakdown {
    pub factor_id: FactorId,
    pub score: u8,
    pub weight: f64,
    pub relevance: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub provider_id: ProviderId,
    /// Integral risk, bounded by the provider's lowest and highest score.
    pub risk: f64,
    /// In weight-profile order.
    pub factors: Vec<FactorBreakdown>,
}

/// `(α_i, b_i)` pairs in weight-profile order.
fn aligned(weights: &WeightProfile, assessment: &ProviderAssessment) -> Result<Vec<(f64, f64)>> {
    assessment.ensure_covers(weights.ids())?;
    Ok(weights
        .factors()
        .iter()
        .map(|w| {
            // ensure_covers guarantees presence
            let b = assessment
                .score(w.factor_id.as_str())
                .map_or(0.0, |s| s.value());
            (w.weight, b)
        })
        .collect())
}

/// Weighted sum `r = Σ α_i b_i`.
pub fn integral_risk(weights: &WeightProfile, assessment: &ProviderAssessment) -> Result<f64> {
    Ok(aligned(weights, assessment)?
        .iter()
        .map(|(alpha, b)| alpha * b)
        .sum())
}

/// Relevance `β_i = b_i / Σ b`, in assessment order.
pub fn relevance_coefficients(assessment: &ProviderAssessment) -> Result<Vec<(FactorId, f64)>> {
    if assessment.is_empty() {
        return Err(Error::Empty("assessment scores"));
    }
    let total: f64 = assessment.scores().map(|(_, s)| s.value()).sum();
    Ok(assessment
        .scores()
        .map(|(f, s)| (f.clone(), s.value() / total))
        .collect())
}

/// Contribution shares `γ_i = α_i b_i / Σ α_j b_j`, in weight-profile order.
///
/// Identical to normalizing the products `α_i β_i`, since `β` only rescales
/// `b` by a constant.
pub fn factor_contributions(
    weights: &WeightProfile,
    assessment: &ProviderAssessment,
) -> Result<Vec<(FactorId, f64)>> {
    let pairs = aligned(weights, assessment)?;
    let risk: f64 = pairs.iter().map(|(alpha, b)| alpha * b).sum();
    Ok(weights
        .ids()
        .zip(&pairs)
        .map(|(id, (alpha, b))| (id.clone(), alpha * b / risk))
        .collect())
}

/// Full report for one provider.
pub fn evaluate(weights: &WeightProfile, assessment: &ProviderAssessment) -> Result<RiskReport> {
    let risk = integral_risk(weights, assessment)?;
    let contributions = factor_contributions(weights, assessment)?;
    let relevance = relevance_coefficients(assessment)?;
    let factors = weights
        .factors()
        .iter()
        .zip(contributions)
        .map(|(w, (_, contribution))| {
            let id = w.factor_id.as_str();
            let relevance = relevance
                .iter()
                .find(|(f, _)| f.as_str() == id)
                .map_or(0.0, |(_, beta)| *beta);
            FactorBreakdown {
                factor_id: w.factor_id.clone(),
                score: assessment.score(id).map_or(0, |s| s.get()),
                weight: w.weight,
                relevance,
                contribution,
            }
        })
        .collect();
    Ok(RiskReport {
        provider_id: assessment.provider_id.clone(),
        risk,
        factors,
    })
}
