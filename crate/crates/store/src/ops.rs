//! Workspace-level pipelines shared by the CLI and the HTTP service.

use std::io;

use provrisk_core::{
    average_panels, build_weight_profile, evaluate, mean_factor_score, normalize_weights,
    panel_consistency, ranked_reports, ConsistencyVerdict, Direction, DistributionDiagnostic,
    FactorDistribution, FactorId, Panel, ProfileBuild, RankedReport, RiskReport, Score,
    WeightPolicy, WeightProfile, DEFAULT_CONSISTENCY_THRESHOLD, DEFAULT_TOLERANCE,
};
use serde::Serialize;

use crate::{Result, StoreError, SurveySource, Workspace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightOptions {
    pub policy: WeightPolicy,
    pub tolerance: f64,
    pub consistency_threshold: f64,
}

impl Default for WeightOptions {
    fn default() -> Self {
        Self {
            policy: WeightPolicy::Strict,
            tolerance: DEFAULT_TOLERANCE,
            consistency_threshold: DEFAULT_CONSISTENCY_THRESHOLD,
        }
    }
}

/// A weight profile computed from the workspace surveys, not yet saved.
#[derive(Debug, Clone, Serialize)]
pub struct WeightsOutcome {
    pub sources: Vec<String>,
    /// Present when both panel tables exist.
    pub consistency: Option<ConsistencyVerdict>,
    pub diagnostics: Vec<DistributionDiagnostic>,
    pub profile: WeightProfile,
}

/// Survey tables feeding the weights, in priority order: both panels
/// (averaged), else the pooled table, else whichever single panel exists.
pub fn survey_inputs(ws: &Workspace) -> Result<Vec<SurveySource>> {
    let present = ws.survey_sources();
    let customer = SurveySource::Panel(Panel::Customer);
    let provider = SurveySource::Panel(Panel::Provider);
    let chosen = if present.contains(&customer) && present.contains(&provider) {
        vec![customer, provider]
    } else if present.contains(&SurveySource::Pooled) {
        vec![SurveySource::Pooled]
    } else if let Some(single) = present.first() {
        vec![*single]
    } else {
        return Err(StoreError::Io {
            path: ws.root().join("survey_<panel>.csv"),
            source: io::Error::new(io::ErrorKind::NotFound, "no survey table in the workspace"),
        });
    };
    Ok(chosen)
}

/// Merges the available surveys, checks panel consistency, and builds the
/// weight profile under `options`. Strict-policy rejections surface as
/// [`provrisk_core::Error::Rejected`].
pub fn compute_weights(ws: &Workspace, options: &WeightOptions) -> Result<WeightsOutcome> {
    let scale = ws.load_scale()?;
    let sources = survey_inputs(ws)?;
    let (merged, consistency): (Vec<FactorDistribution>, _) = match sources.as_slice() {
        [SurveySource::Panel(a), SurveySource::Panel(b)] => {
            let a = ws.load_panel(*a)?;
            let b = ws.load_panel(*b)?;
            let means = |rows: &[FactorDistribution]| -> Result<Vec<f64>> {
                rows.iter()
                    .map(|d| mean_factor_score(d, &scale).map_err(StoreError::from))
                    .collect()
            };
            let merged = average_panels(&a, &b)?;
            let verdict = panel_consistency(
                &means(a.distributions())?,
                &means(b.distributions())?,
                options.consistency_threshold,
            )?;
            (merged, Some(verdict))
        }
        [single] => (ws.load_survey(*single)?, None),
        _ => unreachable!("survey_inputs yields one or two sources"),
    };
    let ProfileBuild {
        profile,
        diagnostics,
        ..
    } = build_weight_profile(&merged, &scale, options.policy, options.tolerance)?;
    Ok(WeightsOutcome {
        sources: sources.iter().map(|s| s.to_string()).collect(),
        consistency,
        diagnostics,
        profile,
    })
}

/// Weight profile from mean scores supplied directly, bypassing the surveys.
pub fn weights_from_means(ws: &Workspace, means: &[(FactorId, f64)]) -> Result<WeightProfile> {
    let catalog = ws.load_catalog()?;
    let mut ordered = Vec::with_capacity(catalog.len());
    for id in catalog.ids() {
        let c = means
            .iter()
            .find(|(f, _)| f == id)
            .map(|(_, c)| *c)
            .ok_or_else(|| StoreError::Integrity(format!("no mean score for factor `{id}`")))?;
        ordered.push((id.clone(), c));
    }
    if let Some((extra, _)) = means
        .iter()
        .find(|(f, _)| catalog.get(f.as_str()).is_none())
    {
        return Err(StoreError::Integrity(format!(
            "factor `{extra}` is not in the catalog"
        )));
    }
    Ok(normalize_weights(&ordered)?)
}

/// Every provider, ranked against the current weight profile. No providers
/// yields an empty ranking.
pub fn rank(ws: &Workspace, direction: Direction) -> Result<Vec<RankedReport>> {
    let weights = ws.require_weights()?;
    let assessments = ws.load_assessments()?;
    if assessments.is_empty() {
        return Ok(Vec::new());
    }
    Ok(ranked_reports(&weights.profile, &assessments, direction)?)
}

/// Report for one provider, optionally under hypothetical score overrides.
/// Nothing is written.
pub fn what_if(
    ws: &Workspace,
    provider: &str,
    overrides: impl IntoIterator<Item = (FactorId, Score)>,
) -> Result<RiskReport> {
    let weights = ws.require_weights()?;
    let assessment = ws.load_assessment(provider)?.ok_or_else(|| {
        StoreError::from(provrisk_core::Error::UnknownId {
            kind: "provider",
            id: provider.to_owned(),
        })
    })?;
    let assessment = assessment.with_overrides(overrides)?;
    Ok(evaluate(&weights.profile, &assessment)?)
}
