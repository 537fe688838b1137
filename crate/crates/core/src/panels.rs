//! Market-wide expert panels: consistency check, merging, and the weight
//! profile built from the merged survey.
//!
//! Customers and providers are surveyed separately over the same factors.
//! When their per-factor mean scores correlate well the two panels are
//! averaged 50/50 into one distribution per factor, which then goes through
//! validation, mean scoring and normalization.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::catalog::{ensure_same_factors, ensure_unique, FactorId};
use crate::distribution::{
    mean_factor_score, renormalize_distribution, validate_distribution, FactorDistribution,
};
use crate::scale::PocketScale;
use crate::weights::{normalize_weights, WeightProfile};
use crate::{Error, Result};

pub const DEFAULT_CONSISTENCY_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Panel {
    Customer,
    Provider,
}

impl Panel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Customer => "customer",
            Self::Provider => "provider",
        }
    }
}

impl fmt::Display for Panel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Panel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "customer" => Ok(Self::Customer),
            "provider" => Ok(Self::Provider),
            other => Err(Error::UnknownId {
                kind: "panel",
                id: other.to_owned(),
            }),
        }
    }
}

/// One panel's survey: a distribution per factor, all over the same scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelSurvey {
    pub panel: Panel,
    pub captured_at: DateTime<Utc>,
    distributions: Vec<FactorDistribution>,
}

impl PanelSurvey {
    pub fn new(
        panel: Panel,
        captured_at: DateTime<Utc>,
        distributions: Vec<FactorDistribution>,
    ) -> Result<Self> {
        if distributions.is_empty() {
            return Err(Error::Empty("panel survey"));
        }
        ensure_unique("factor", distributions.iter().map(|d| d.factor_id.as_str()))?;
        let n = distributions[0].fractions.len();
        if let Some(d) = distributions.iter().find(|d| d.fractions.len() != n) {
            return Err(Error::length(
                format!("distribution of factor `{}`", d.factor_id),
                n,
                d.fractions.len(),
            ));
        }
        Ok(Self {
            panel,
            captured_at,
            distributions,
        })
    }

    pub fn distributions(&self) -> &[FactorDistribution] {
        &self.distributions
    }

    /// Mean factor scores, in survey order.
    pub fn mean_scores(&self, scale: &PocketScale) -> Result<Vec<(FactorId, f64)>> {
        self.distributions
            .iter()
            .map(|d| Ok((d.factor_id.clone(), mean_factor_score(d, scale)?)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyVerdict {
    pub correlation: f64,
    pub threshold: f64,
    pub consistent: bool,
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::length("correlated series", x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation(format!(
            "need at least 2 points, got {}",
            x.len()
        )));
    }
    for (name, v) in [("first", x), ("second", y)] {
        if v.iter().all(|&value| value == v[0]) {
            return Err(Error::UndefinedCorrelation(format!(
                "{name} series is constant"
            )));
        }
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Correlates two panels' per-factor mean scores. A low correlation is
/// reported, not treated as an error.
pub fn panel_consistency(x: &[f64], y: &[f64], threshold: f64) -> Result<ConsistencyVerdict> {
    let correlation = pearson(x, y)?;
    Ok(ConsistencyVerdict {
        correlation,
        threshold,
        consistent: correlation >= threshold,
    })
}

/// Elementwise 50/50 average of two panels, matched by factor id and
/// returned in the order of `a`.
pub fn average_panels(a: &PanelSurvey, b: &PanelSurvey) -> Result<Vec<FactorDistribution>> {
    ensure_same_factors(
        a.distributions.iter().map(|d| &d.factor_id),
        b.distributions.iter().map(|d| &d.factor_id),
    )?;
    a.distributions
        .iter()
        .map(|da| {
            let db = b
                .distributions
                .iter()
                .find(|d| d.factor_id == da.factor_id)
                .expect("factor sets checked above");
            if da.fractions.len() != db.fractions.len() {
                return Err(Error::length(
                    format!(
                        "{} panel distribution of factor `{}`",
                        b.panel, db.factor_id
                    ),
                    da.fractions.len(),
                    db.fractions.len(),
                ));
            }
            Ok(FactorDistribution {
                factor_id: da.factor_id.clone(),
                fractions: da
                    .fractions
                    .iter()
                    .zip(&db.fractions)
                    .map(|(p, q)| (p + q) / 2.0)
                    .collect(),
            })
        })
        .collect()
}

/// What to do with a distribution that fails validation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightPolicy {
    /// Reject the whole profile.
    #[default]
    Strict,
    /// Rescale the offending distribution to sum to 1 and carry on.
    Renormalize,
}

impl FromStr for WeightPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Self::Strict),
            "renormalize" => Ok(Self::Renormalize),
            other => Err(Error::invariant(
                "weight policy is `strict` or `renormalize`",
                format!("got `{other}`"),
            )),
        }
    }
}

/// A distribution that failed validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionDiagnostic {
    pub factor_id: FactorId,
    pub sum: f64,
    pub renormalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileBuild {
    pub profile: WeightProfile,
    /// One entry per factor that failed validation.
    pub diagnostics: Vec<DistributionDiagnostic>,
    /// Distributions actually scored, after any renormalization.
    pub effective: Vec<FactorDistribution>,
}

/// Validates, optionally renormalizes, scores and normalizes the merged
/// survey. Under [`WeightPolicy::Strict`] any invalid distribution rejects
/// the build with [`Error::Rejected`] listing every failure.
pub fn build_weight_profile(
    merged: &[FactorDistribution],
    scale: &PocketScale,
    policy: WeightPolicy,
    tolerance: f64,
) -> Result<ProfileBuild> {
    if merged.is_empty() {
        return Err(Error::Empty("survey distributions"));
    }
    ensure_unique("factor", merged.iter().map(|d| d.factor_id.as_str()))?;

    let mut diagnostics = Vec::new();
    let mut effective = Vec::with_capacity(merged.len());
    for dist in merged {
        let check = validate_distribution(dist, scale, tolerance)?;
        if check.passed {
            effective.push(dist.clone());
            continue;
        }
        let renormalized = policy == WeightPolicy::Renormalize;
        diagnostics.push(DistributionDiagnostic {
            factor_id: dist.factor_id.clone(),
            sum: check.sum,
            renormalized,
        });
        if renormalized {
            effective.push(renormalize_distribution(dist)?);
        }
    }
    if policy == WeightPolicy::Strict && !diagnostics.is_empty() {
        return Err(Error::Rejected(diagnostics));
    }

    let means = effective
        .iter()
        .map(|d| Ok((d.factor_id.clone(), mean_factor_score(d, scale)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfileBuild {
        profile: normalize_weights(&means)?,
        diagnostics,
        effective,
    })
}
