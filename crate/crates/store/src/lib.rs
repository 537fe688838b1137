//! File-backed workspace for provrisk.
//!
//! A workspace is a plain directory:
//!
//! ```text
//! workspace.json           schema version and version counters
//! scale.json               {"borders": [1, 3, 5, 7.5, 10]}
//! factors.json             [{"id", "name", "category"}, ...]
//! survey_<panel>.csv       factor_id,q1..qn   (customer | provider | pooled)
//! weights.json             {"version", "c": {...}, "alpha": {...}}
//! history/weights_v<N>.json
//! assessments.csv          provider_id,factor_id,b
//! assessments.log.jsonl    append-only revision log
//! ```
//!
//! Survey weights are rebuilt rarely and every rebuild gets a new profile
//! version; provider scores change often and every save appends a revision
//! that records the profile version it was made against. Each file is
//! replaced atomically, so readers only ever see committed content.

mod error;
pub mod fixtures;
pub mod formats;
mod fsutil;
pub mod ops;
mod workspace;

pub use error::{Result, StoreError};
pub use workspace::{
    AssessmentRevision, Manifest, StoredProfile, SurveySource, Workspace, SCHEMA_VERSION,
};
