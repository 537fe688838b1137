//! Deterministic provider ranking.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assessment::{ProviderAssessment, ProviderId};
use crate::catalog::ensure_unique;
use crate::scoring::{evaluate, RiskReport};
use crate::weights::WeightProfile;
use crate::{Error, Result};

/// Which end of the risk scale ranks first.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Lowest integral risk first.
    #[default]
    #[serde(rename = "min")]
    MinRisk,
    /// Highest integral risk first.
    #[serde(rename = "max")]
    MaxScore,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Self::MinRisk),
            "max" => Ok(Self::MaxScore),
            other => Err(Error::invariant(
                "ranking direction is `min` or `max`",
                format!("got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Self::MinRisk => "min",
            Self::MaxScore => "max",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedProvider {
    /// 1-based position.
    pub rank: usize,
    pub provider_id: ProviderId,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedReport {
    pub rank: usize,
    #[serde(flatten)]
    pub report: RiskReport,
}

fn order(direction: Direction, a: (&ProviderId, f64), b: (&ProviderId, f64)) -> Ordering {
    let by_risk = match direction {
        Direction::MinRisk => a.1.total_cmp(&b.1),
        Direction::MaxScore => b.1.total_cmp(&a.1),
    };
    by_risk.then_with(|| a.0.cmp(b.0))
}

/// Orders providers by integral risk; equal risks fall back to ascending
/// provider id, so the result never depends on input order.
pub fn rank_providers(
    weights: &WeightProfile,
    assessments: &[ProviderAssessment],
    direction: Direction,
) -> Result<Vec<RankedProvider>> {
    Ok(ranked_reports(weights, assessments, direction)?
        .into_iter()
        .map(|r| RankedProvider {
            rank: r.rank,
            provider_id: r.report.provider_id,
            risk: r.report.risk,
        })
        .collect())
}

/// Like [`rank_providers`] but keeps the full per-factor report.
pub fn ranked_reports(
    weights: &WeightProfile,
    assessments: &[ProviderAssessment],
    direction: Direction,
) -> Result<Vec<RankedReport>> {
    if assessments.is_empty() {
        return Err(Error::Empty("provider assessments"));
    }
    ensure_unique(
        "provider",
        assessments.iter().map(|a| a.provider_id.as_str()),
    )?;
    let mut reports = assessments
        .iter()
        .map(|a| evaluate(weights, a))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| {
        order(
            direction,
            (&a.provider_id, a.risk),
            (&b.provider_id, b.risk),
        )
    });
    Ok(reports
        .into_iter()
        .enumerate()
        .map(|(i, report)| RankedReport {
            rank: i + 1,
            report,
        })
        .collect())
}
