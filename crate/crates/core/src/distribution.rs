//! Per-factor survey distributions over the pocket scale.

use serde::{Deserialize, Serialize};

use crate::catalog::FactorId;
use crate::scale::PocketScale;
use crate::{Error, Result};

/// Default allowed deviation of a distribution's sum from 1.
pub const DEFAULT_TOLERANCE: f64 = 0.02;

/// Absolute slack added to every tolerance comparison. Survey fractions are
/// decimal values, and their binary sum can overshoot a boundary such as
/// `1.02` by a few ulps.
pub const SUM_SLACK: f64 = 1e-9;

/// Fractions of respondents whose answer for one factor fell in each pocket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorDistribution {
    pub factor_id: FactorId,
    pub fractions: Vec<f64>,
}

impl FactorDistribution {
    /// Checks that every fraction lies in `[0, 1]`. The sum is not checked
    /// here; see [`validate_distribution`].
    pub fn new(factor_id: impl Into<FactorId>, fractions: Vec<f64>) -> Result<Self> {
        let factor_id = factor_id.into();
        if let Some(q) = fractions.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(Error::invariant(
                "survey fractions lie in [0, 1]",
                format!("factor `{factor_id}` has fraction {q}"),
            ));
        }
        Ok(Self {
            factor_id,
            fractions,
        })
    }

    pub fn sum(&self) -> f64 {
        self.fractions.iter().sum()
    }

    pub(crate) fn check_len(&self, scale: &PocketScale) -> Result<()> {
        if self.fractions.len() != scale.len() {
            return Err(Error::length(
                format!("distribution of factor `{}`", self.factor_id),
                scale.len(),
                self.fractions.len(),
            ));
        }
        Ok(())
    }
}

/// Outcome of [`validate_distribution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionCheck {
    pub sum: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl DistributionCheck {
    /// How far the sum falls short of 1 (negative when it overshoots).
    pub fn deficit(&self) -> f64 {
        1.0 - self.sum
    }
}

/// Passes iff `|Σq − 1| ≤ tolerance`.
pub fn validate_distribution(
    dist: &FactorDistribution,
    scale: &PocketScale,
    tolerance: f64,
) -> Result<DistributionCheck> {
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::invariant(
            "validation tolerance is non-negative",
            format!("tolerance {tolerance}"),
        ));
    }
    dist.check_len(scale)?;
    let sum = dist.sum();
    Ok(DistributionCheck {
        sum,
        tolerance,
        passed: (sum - 1.0).abs() <= tolerance + SUM_SLACK,
    })
}

/// Rescales the fractions so they sum to 1.
pub fn renormalize_distribution(dist: &FactorDistribution) -> Result<FactorDistribution> {
    let sum = dist.sum();
    if sum.is_nan() || sum <= 0.0 {
        return Err(Error::Degenerate(format!(
            "distribution of factor `{}` has no mass",
            dist.factor_id
        )));
    }
    Ok(FactorDistribution {
        factor_id: dist.factor_id.clone(),
        fractions: dist.fractions.iter().map(|q| q / sum).collect(),
    })
}

/// Expected pocket score `c = Σ a_j q_j`.
pub fn mean_factor_score(dist: &FactorDistribution, scale: &PocketScale) -> Result<f64> {
    dist.check_len(scale)?;
    Ok(scale
        .borders()
        .iter()
        .zip(&dist.fractions)
        .map(|(a, q)| a * q)
        .sum())
}
