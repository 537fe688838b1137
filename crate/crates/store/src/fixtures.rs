//! The reference nine-factor survey, shipped as a ready-made workspace.
//!
//! Its survey table holds the published panel averages. Only the last two
//! rows sum to 1 within 0.02, and the published mean scores for the other
//! rows cannot be recomputed from their fractions, so `weights.json` is
//! built from the published mean scores (also in `means.csv`). One provider,
//! `provider-1`, carries the published 1–5 scores.

use std::fs;
use std::path::Path;

use crate::fsutil::write_atomic;
use crate::{Result, StoreError, Workspace};

pub const REFERENCE_PROVIDER: &str = "provider-1";

pub const REFERENCE_FILES: &[(&str, &str)] = &[
    (
        "workspace.json",
        include_str!("../fixtures/reference/workspace.json"),
    ),
    (
        "scale.json",
        include_str!("../fixtures/reference/scale.json"),
    ),
    (
        "factors.json",
        include_str!("../fixtures/reference/factors.json"),
    ),
    (
        "survey_pooled.csv",
        include_str!("../fixtures/reference/survey_pooled.csv"),
    ),
    (
        "weights.json",
        include_str!("../fixtures/reference/weights.json"),
    ),
    (
        "assessments.csv",
        include_str!("../fixtures/reference/assessments.csv"),
    ),
    (
        "assessments.log.jsonl",
        include_str!("../fixtures/reference/assessments.log.jsonl"),
    ),
    ("means.csv", include_str!("../fixtures/reference/means.csv")),
];

/// Writes the reference workspace into `dir` (created if needed) and opens it.
pub fn write_reference(dir: &Path) -> Result<Workspace> {
    fs::create_dir_all(dir).map_err(|e| StoreError::io(dir, e))?;
    if dir.join("workspace.json").exists() {
        return Err(StoreError::Integrity(format!(
            "{} already holds a workspace",
            dir.display()
        )));
    }
    for (name, contents) in REFERENCE_FILES {
        write_atomic(&dir.join(name), contents.as_bytes())?;
    }
    Workspace::load(dir)
}
