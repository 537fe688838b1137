//! CSV tables: panel surveys, provider assessments and directly supplied
//! mean scores.
//!
//! Numbers are written with the shortest decimal that parses back to the
//! same `f64`, so every save/load cycle is lossless.

use std::path::Path;

use indexmap::IndexMap;
use provrisk_core::{FactorDistribution, FactorId, ProviderAssessment, ProviderId, Score};

use crate::{Result, StoreError};

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(path: &Path, w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| StoreError::parse(path, None, None, e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8 input unchanged"))
}

fn csv_err(path: &Path, e: csv::Error) -> StoreError {
    let line = e.position().map(|p| p.line());
    StoreError::parse(path, line, None, e.to_string())
}

fn check_header(path: &Path, rdr: &mut csv::Reader<&[u8]>, expected: &[String]) -> Result<()> {
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?;
    let found: Vec<&str> = headers.iter().collect();
    if found != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(StoreError::parse(
            path,
            Some(1),
            None,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                found.join(",")
            ),
        ));
    }
    Ok(())
}

fn parse_f64(path: &Path, line: u64, field: &str, raw: &str) -> Result<f64> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            StoreError::parse(
                path,
                Some(line),
                Some(field),
                format!("`{raw}` is not a number"),
            )
        })
}

fn survey_header(pockets: usize) -> Vec<String> {
    std::iter::once("factor_id".to_owned())
        .chain((1..=pockets).map(|j| format!("q{j}")))
        .collect()
}

/// Parses `factor_id,q1..qn` for a scale of `pockets` borders.
pub fn parse_survey_csv(
    path: &Path,
    text: &str,
    pockets: usize,
) -> Result<Vec<FactorDistribution>> {
    let mut rdr = reader(text);
    check_header(path, &mut rdr, &survey_header(pockets))?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let factor = record.get(0).unwrap_or_default();
        if factor.is_empty() {
            return Err(StoreError::parse(
                path,
                Some(line),
                Some("factor_id"),
                "empty factor id",
            ));
        }
        let found = record.len().saturating_sub(1);
        if found != pockets {
            return Err(StoreError::parse(
                path,
                Some(line),
                None,
                format!("row for factor `{factor}` has {found} fractions, the scale has {pockets} pockets"),
            ));
        }
        let fractions = record
            .iter()
            .skip(1)
            .enumerate()
            .map(|(j, raw)| parse_f64(path, line, &format!("q{}", j + 1), raw))
            .collect::<Result<Vec<_>>>()?;
        let dist = FactorDistribution::new(factor, fractions)
            .map_err(|e| StoreError::parse(path, Some(line), None, e.to_string()))?;
        if rows
            .iter()
            .any(|d: &FactorDistribution| d.factor_id == dist.factor_id)
        {
            return Err(StoreError::parse(
                path,
                Some(line),
                Some("factor_id"),
                format!("factor `{factor}` appears twice"),
            ));
        }
        rows.push(dist);
    }
    Ok(rows)
}

pub fn write_survey_csv(path: &Path, rows: &[FactorDistribution]) -> Result<String> {
    let pockets = rows.first().map_or(0, |d| d.fractions.len());
    let mut w = writer();
    let err = |e: csv::Error| csv_err(path, e);
    w.write_record(survey_header(pockets)).map_err(err)?;
    for d in rows {
        let mut record = vec![d.factor_id.to_string()];
        record.extend(d.fractions.iter().map(f64::to_string));
        w.write_record(&record).map_err(err)?;
    }
    finish(path, w)
}

const ASSESSMENT_HEADER: [&str; 3] = ["provider_id", "factor_id", "b"];

/// Parses `provider_id,factor_id,b`. Providers come back in order of first
/// appearance, their factors in row order.
pub fn parse_assessments_csv(path: &Path, text: &str) -> Result<Vec<ProviderAssessment>> {
    let mut rdr = reader(text);
    check_header(path, &mut rdr, &ASSESSMENT_HEADER.map(String::from))?;
    let mut grouped: IndexMap<String, Vec<(FactorId, Score)>> = IndexMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(StoreError::parse(
                path,
                Some(line),
                None,
                format!("expected 3 fields, found {}", record.len()),
            ));
        }
        let (provider, factor, raw) = (&record[0], &record[1], &record[2]);
        for (name, value) in [("provider_id", provider), ("factor_id", factor)] {
            if value.is_empty() {
                return Err(StoreError::parse(path, Some(line), Some(name), "empty id"));
            }
        }
        let score = raw
            .parse::<i64>()
            .map_err(|_| {
                StoreError::parse(
                    path,
                    Some(line),
                    Some("b"),
                    format!("`{raw}` is not an integer"),
                )
            })
            .and_then(|v| {
                Score::new(v)
                    .map_err(|e| StoreError::parse(path, Some(line), Some("b"), e.to_string()))
            })?;
        let scores = grouped.entry(provider.to_owned()).or_default();
        if scores.iter().any(|(f, _)| f.as_str() == factor) {
            return Err(StoreError::parse(
                path,
                Some(line),
                Some("factor_id"),
                format!("provider `{provider}` scores factor `{factor}` twice"),
            ));
        }
        scores.push((FactorId::from(factor), score));
    }
    grouped
        .into_iter()
        .map(|(provider, scores)| {
            ProviderAssessment::new(ProviderId::from(provider), scores).map_err(StoreError::from)
        })
        .collect()
}

pub fn write_assessments_csv(path: &Path, assessments: &[ProviderAssessment]) -> Result<String> {
    let mut w = writer();
    let err = |e: csv::Error| csv_err(path, e);
    w.write_record(ASSESSMENT_HEADER).map_err(err)?;
    for a in assessments {
        for (factor, score) in a.scores() {
            w.write_record([
                a.provider_id.as_str(),
                factor.as_str(),
                &score.get().to_string(),
            ])
            .map_err(err)?;
        }
    }
    finish(path, w)
}

/// Parses `factor_id,c`: mean factor scores supplied directly instead of
/// being computed from a survey.
pub fn parse_means_csv(path: &Path, text: &str) -> Result<Vec<(FactorId, f64)>> {
    let mut rdr = reader(text);
    check_header(path, &mut rdr, &["factor_id".to_owned(), "c".to_owned()])?;
    let mut out: Vec<(FactorId, f64)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(StoreError::parse(
                path,
                Some(line),
                None,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        let c = parse_f64(path, line, "c", &record[1])?;
        if out.iter().any(|(f, _)| f.as_str() == &record[0]) {
            return Err(StoreError::parse(
                path,
                Some(line),
                Some("factor_id"),
                format!("factor `{}` appears twice", &record[0]),
            ));
        }
        out.push((FactorId::from(&record[0]), c));
    }
    Ok(out)
}
