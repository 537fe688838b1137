use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::Json;
use chrono::{DateTime, Utc};
use indexmap::IndexMap;
use provrisk_core::{
    evaluate, validate_distribution, ConsistencyVerdict, Direction, DistributionDiagnostic,
    FactorDistribution, FactorId, FactorWeight, PocketScale, ProviderAssessment, RankedReport,
    RiskFactor, RiskReport, Score, WeightPolicy, DEFAULT_TOLERANCE,
};
use provrisk_store::ops::{self, WeightOptions};
use provrisk_store::SurveySource;
use serde::{Deserialize, Serialize};

use crate::{ApiError, SharedWorkspace};

type ApiResult<T> = Result<Json<T>, ApiError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::bad_request("request body is well-formed JSON", e.body_text()))
}

fn check_version(expected: Option<u64>, current: u64) -> Result<(), ApiError> {
    match expected {
        Some(v) if v != current => Err(ApiError::conflict(v, current)),
        _ => Ok(()),
    }
}

fn scores(raw: IndexMap<String, i64>) -> Result<Vec<(FactorId, Score)>, ApiError> {
    raw.into_iter()
        .map(|(f, b)| {
            Score::new(b)
                .map(|s| (FactorId::from(f), s))
                .map_err(ApiError::from)
        })
        .collect()
}

#[derive(Serialize)]
pub struct Catalog {
    version: u64,
    factors: Vec<RiskFactor>,
}

pub async fn factors(State(ws): State<SharedWorkspace>) -> ApiResult<Catalog> {
    let ws = ws.read().await;
    Ok(Json(Catalog {
        version: ws.catalog_version(),
        factors: ws.load_catalog()?.factors().to_vec(),
    }))
}

pub async fn scale(State(ws): State<SharedWorkspace>) -> ApiResult<PocketScale> {
    Ok(Json(ws.read().await.load_scale()?))
}

#[derive(Deserialize)]
pub struct SurveyRow {
    factor_id: String,
    fractions: Vec<f64>,
}

#[derive(Deserialize)]
pub struct SurveyUpload {
    rows: Vec<SurveyRow>,
    captured_at: Option<DateTime<Utc>>,
    expected_version: Option<u64>,
}

#[derive(Serialize)]
pub struct RowCheck {
    factor_id: FactorId,
    sum: f64,
    passed: bool,
}

#[derive(Serialize)]
pub struct SurveyStored {
    version: u64,
    tolerance: f64,
    validation: Vec<RowCheck>,
}

pub async fn put_survey(
    State(ws): State<SharedWorkspace>,
    Path(panel): Path<String>,
    payload: Result<Json<SurveyUpload>, JsonRejection>,
) -> ApiResult<SurveyStored> {
    let source: SurveySource = panel.parse()?;
    let upload = body(payload)?;
    let rows = upload
        .rows
        .into_iter()
        .map(|r| FactorDistribution::new(r.factor_id, r.fractions))
        .collect::<Result<Vec<_>, _>>()?;

    let mut ws = ws.write().await;
    let scale = ws.load_scale()?;
    let catalog = ws.load_catalog()?;
    if !catalog.ids().eq(rows.iter().map(|d| &d.factor_id)) {
        return Err(ApiError::bad_request(
            "every catalog factor is covered exactly once",
            "survey rows must list every catalog factor once, in catalog order",
        ));
    }
    let validation = rows
        .iter()
        .map(|d| {
            let check = validate_distribution(d, &scale, DEFAULT_TOLERANCE)?;
            Ok(RowCheck {
                factor_id: d.factor_id.clone(),
                sum: check.sum,
                passed: check.passed,
            })
        })
        .collect::<Result<Vec<_>, provrisk_core::Error>>()?;
    check_version(upload.expected_version, ws.survey_version())?;
    let version = ws.save_survey(source, &rows, upload.captured_at.unwrap_or_else(Utc::now))?;
    Ok(Json(SurveyStored {
        version,
        tolerance: DEFAULT_TOLERANCE,
        validation,
    }))
}

#[derive(Deserialize, Default)]
pub struct WeightsRequest {
    policy: Option<WeightPolicy>,
    tolerance: Option<f64>,
    threshold: Option<f64>,
    expected_version: Option<u64>,
}

#[derive(Serialize)]
pub struct WeightsBuilt {
    version: u64,
    sources: Vec<String>,
    consistency: Option<ConsistencyVerdict>,
    diagnostics: Vec<DistributionDiagnostic>,
    factors: Vec<FactorWeight>,
}

pub async fn post_weights(
    State(ws): State<SharedWorkspace>,
    payload: Result<Json<WeightsRequest>, JsonRejection>,
) -> ApiResult<WeightsBuilt> {
    let request = body(payload)?;
    let defaults = WeightOptions::default();
    let options = WeightOptions {
        policy: request.policy.unwrap_or(defaults.policy),
        tolerance: request.tolerance.unwrap_or(defaults.tolerance),
        consistency_threshold: request.threshold.unwrap_or(defaults.consistency_threshold),
    };
    let mut ws = ws.write().await;
    check_version(request.expected_version, ws.weights_version())?;
    let outcome = ops::compute_weights(&ws, &options)?;
    let stored = ws.save_weights(&outcome.profile)?;
    Ok(Json(WeightsBuilt {
        version: stored.version,
        sources: outcome.sources,
        consistency: outcome.consistency,
        diagnostics: outcome.diagnostics,
        factors: stored.profile.factors().to_vec(),
    }))
}

#[derive(Serialize)]
pub struct CurrentWeights {
    version: u64,
    created_at: Option<DateTime<Utc>>,
    factors: Vec<FactorWeight>,
}

pub async fn get_weights(State(ws): State<SharedWorkspace>) -> ApiResult<CurrentWeights> {
    let stored = ws.read().await.load_weights()?.ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "no weight profile has been built yet",
        )
    })?;
    Ok(Json(CurrentWeights {
        version: stored.version,
        created_at: stored.created_at,
        factors: stored.profile.factors().to_vec(),
    }))
}

#[derive(Serialize)]
pub struct ProviderEntry {
    provider_id: String,
    scores: IndexMap<String, u8>,
}

#[derive(Serialize)]
pub struct ProviderList {
    version: u64,
    providers: Vec<ProviderEntry>,
}

pub async fn providers(State(ws): State<SharedWorkspace>) -> ApiResult<ProviderList> {
    let ws = ws.read().await;
    let providers = ws
        .load_assessments()?
        .into_iter()
        .map(|a| ProviderEntry {
            provider_id: a.provider_id.to_string(),
            scores: a.scores().map(|(f, s)| (f.to_string(), s.get())).collect(),
        })
        .collect();
    Ok(Json(ProviderList {
        version: ws.assessment_revision(),
        providers,
    }))
}

#[derive(Deserialize)]
pub struct AssessmentUpload {
    scores: IndexMap<String, i64>,
    expected_version: Option<u64>,
}

#[derive(Serialize)]
pub struct AssessmentStored {
    version: u64,
    report: RiskReport,
}

pub async fn put_assessment(
    State(ws): State<SharedWorkspace>,
    Path(id): Path<String>,
    payload: Result<Json<AssessmentUpload>, JsonRejection>,
) -> ApiResult<AssessmentStored> {
    let upload = body(payload)?;
    let assessment = ProviderAssessment::new(id.as_str(), scores(upload.scores)?)?;
    let mut ws = ws.write().await;
    assessment.ensure_covers(ws.load_catalog()?.ids())?;
    check_version(upload.expected_version, ws.assessment_revision())?;
    let weights = ws.require_weights()?;
    let report = evaluate(&weights.profile, &assessment)?;
    let version = ws.upsert_assessment(assessment)?;
    Ok(Json(AssessmentStored { version, report }))
}

#[derive(Deserialize)]
pub struct RankQuery {
    direction: Option<String>,
}

pub async fn rank(
    State(ws): State<SharedWorkspace>,
    Query(query): Query<RankQuery>,
) -> ApiResult<Vec<RankedReport>> {
    let direction: Direction = match query.direction {
        Some(d) => d.parse()?,
        None => Direction::default(),
    };
    Ok(Json(ops::rank(&*ws.read().await, direction)?))
}

#[derive(Deserialize)]
pub struct WhatIfRequest {
    provider_id: String,
    #[serde(default)]
    overrides: IndexMap<String, i64>,
}

pub async fn what_if(
    State(ws): State<SharedWorkspace>,
    payload: Result<Json<WhatIfRequest>, JsonRejection>,
) -> ApiResult<RiskReport> {
    let request = body(payload)?;
    let overrides = scores(request.overrides)?;
    let ws = ws.read().await;
    Ok(Json(ops::what_if(&ws, &request.provider_id, overrides)?))
}
