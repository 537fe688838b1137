use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use indexmap::IndexMap;
use provrisk_core::{
    FactorCatalog, FactorDistribution, FactorId, FactorWeight, Panel, PanelSurvey, PocketScale,
    ProviderAssessment, ProviderId, WeightProfile,
};
use serde::{Deserialize, Serialize};

use crate::formats;
use crate::fsutil::{parse_json, read_json, read_to_string, write_atomic, write_json};
use crate::{Result, StoreError};

pub const SCHEMA_VERSION: u64 = 1;

const MANIFEST: &str = "workspace.json";
const SCALE: &str = "scale.json";
const FACTORS: &str = "factors.json";
const WEIGHTS: &str = "weights.json";
const HISTORY: &str = "history";
const ASSESSMENTS: &str = "assessments.csv";
const REVISION_LOG: &str = "assessments.log.jsonl";

/// Where a survey table comes from. `Pooled` holds panel averages that
/// were published without the separate panel tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurveySource {
    Panel(Panel),
    Pooled,
}

impl SurveySource {
    pub const ALL: [SurveySource; 3] = [
        SurveySource::Panel(Panel::Customer),
        SurveySource::Panel(Panel::Provider),
        SurveySource::Pooled,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Panel(p) => p.as_str(),
            Self::Pooled => "pooled",
        }
    }

    pub fn file_name(self) -> String {
        format!("survey_{}.csv", self.as_str())
    }
}

impl fmt::Display for SurveySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for SurveySource {
    type Err = provrisk_core::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pooled" => Ok(Self::Pooled),
            other => other.parse().map(Self::Panel),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u64,
    pub catalog_version: u64,
    pub survey_version: u64,
    /// Capture time of each survey table, keyed by source name.
    #[serde(default)]
    pub surveys: BTreeMap<String, DateTime<Utc>>,
}

#[derive(Deserialize)]
struct SchemaProbe {
    schema_version: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentRevision {
    pub revision: u64,
    pub at: DateTime<Utc>,
    /// Weight profile in force when the scores were saved.
    pub weights_version: u64,
    /// Providers whose scores changed.
    pub providers: Vec<ProviderId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredProfile {
    pub version: u64,
    pub created_at: Option<DateTime<Utc>>,
    pub profile: WeightProfile,
}

#[derive(Serialize, Deserialize)]
struct WeightsFile {
    version: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    created_at: Option<DateTime<Utc>>,
    c: IndexMap<String, f64>,
    alpha: IndexMap<String, f64>,
}

impl WeightsFile {
    fn from_stored(stored: &StoredProfile) -> Self {
        let factors = stored.profile.factors();
        Self {
            version: stored.version,
            created_at: stored.created_at,
            c: factors
                .iter()
                .map(|f| (f.factor_id.to_string(), f.mean_score))
                .collect(),
            alpha: factors
                .iter()
                .map(|f| (f.factor_id.to_string(), f.weight))
                .collect(),
        }
    }

    fn into_stored(self, path: &Path) -> Result<StoredProfile> {
        if !self.c.keys().eq(self.alpha.keys()) {
            return Err(StoreError::parse(
                path,
                None,
                Some("alpha"),
                "`c` and `alpha` must list the same factors in the same order",
            ));
        }
        let factors = self
            .c
            .iter()
            .zip(self.alpha.values())
            .map(|((id, c), alpha)| FactorWeight {
                factor_id: FactorId::from(id.as_str()),
                mean_score: *c,
                weight: *alpha,
            })
            .collect();
        let profile = WeightProfile::from_parts(factors)
            .map_err(|e| StoreError::parse(path, None, Some("alpha"), e.to_string()))?;
        Ok(StoredProfile {
            version: self.version,
            created_at: self.created_at,
            profile,
        })
    }
}

/// Handle on a workspace directory. Mutating methods take `&mut self`: one
/// handle is the single writer for its directory.
#[derive(Debug, Clone)]
pub struct Workspace {
    root: PathBuf,
    manifest: Manifest,
    weights_version: u64,
    revisions: Vec<AssessmentRevision>,
}

impl Workspace {
    /// Initializes an empty workspace with a catalog and a scale.
    pub fn create(
        root: impl Into<PathBuf>,
        catalog: &FactorCatalog,
        scale: &PocketScale,
    ) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| StoreError::io(&root, e))?;
        if root.join(MANIFEST).exists() {
            return Err(StoreError::Integrity(format!(
                "{} already holds a workspace",
                root.display()
            )));
        }
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            catalog_version: 1,
            survey_version: 0,
            surveys: BTreeMap::new(),
        };
        write_json(&root.join(SCALE), scale)?;
        write_json(&root.join(FACTORS), catalog)?;
        write_json(&root.join(MANIFEST), &manifest)?;
        Ok(Self {
            root,
            manifest,
            weights_version: 0,
            revisions: Vec::new(),
        })
    }

    /// Opens an existing workspace and checks the revision log against the
    /// stored weight profiles.
    pub fn load(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        let manifest_path = root.join(MANIFEST);
        let text = read_to_string(&manifest_path)?;
        let probe: SchemaProbe = parse_json(&manifest_path, &text)?;
        if probe.schema_version != SCHEMA_VERSION {
            return Err(StoreError::Version {
                path: manifest_path,
                found: probe.schema_version,
                supported: SCHEMA_VERSION,
            });
        }
        let manifest: Manifest = parse_json(&manifest_path, &text)?;

        let mut ws = Self {
            root,
            manifest,
            weights_version: 0,
            revisions: Vec::new(),
        };
        if let Some(stored) = ws.read_weights_file(&ws.path(WEIGHTS))? {
            ws.weights_version = stored.version;
        }
        ws.revisions = ws.read_revision_log()?;
        for rev in &ws.revisions {
            if !ws.profile_exists(rev.weights_version) {
                return Err(StoreError::Integrity(format!(
                    "assessment revision {} references weight profile v{}, which does not exist",
                    rev.revision, rev.weights_version
                )));
            }
        }
        Ok(ws)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn history_path(&self, version: u64) -> PathBuf {
        self.root
            .join(HISTORY)
            .join(format!("weights_v{version}.json"))
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn catalog_version(&self) -> u64 {
        self.manifest.catalog_version
    }

    pub fn survey_version(&self) -> u64 {
        self.manifest.survey_version
    }

    /// 0 until the first profile is saved.
    pub fn weights_version(&self) -> u64 {
        self.weights_version
    }

    /// 0 until the first assessments are saved.
    pub fn assessment_revision(&self) -> u64 {
        self.revisions.last().map_or(0, |r| r.revision)
    }

    pub fn revisions(&self) -> &[AssessmentRevision] {
        &self.revisions
    }

    fn save_manifest(&self) -> Result<()> {
        write_json(&self.path(MANIFEST), &self.manifest)
    }

    pub fn load_scale(&self) -> Result<PocketScale> {
        read_json(&self.path(SCALE))
    }

    pub fn save_scale(&mut self, scale: &PocketScale) -> Result<()> {
        write_json(&self.path(SCALE), scale)
    }

    pub fn load_catalog(&self) -> Result<FactorCatalog> {
        read_json(&self.path(FACTORS))
    }

    pub fn save_catalog(&mut self, catalog: &FactorCatalog) -> Result<u64> {
        write_json(&self.path(FACTORS), catalog)?;
        self.manifest.catalog_version += 1;
        self.save_manifest()?;
        Ok(self.manifest.catalog_version)
    }

    /// Survey tables present on disk.
    pub fn survey_sources(&self) -> Vec<SurveySource> {
        SurveySource::ALL
            .into_iter()
            .filter(|s| self.path(&s.file_name()).is_file())
            .collect()
    }

    /// Reads a survey table and checks it against the scale and catalog.
    pub fn load_survey(&self, source: SurveySource) -> Result<Vec<FactorDistribution>> {
        let path = self.path(&source.file_name());
        let text = read_to_string(&path)?;
        let scale = self.load_scale()?;
        let rows = formats::parse_survey_csv(&path, &text, scale.len())?;
        let catalog = self.load_catalog()?;
        if !catalog.ids().eq(rows.iter().map(|d| &d.factor_id)) {
            let found: Vec<&str> = rows.iter().map(|d| d.factor_id.as_str()).collect();
            let expected: Vec<&str> = catalog.ids().map(FactorId::as_str).collect();
            return Err(StoreError::Integrity(format!(
                "{} lists factors [{}] but the catalog has [{}]",
                path.display(),
                found.join(", "),
                expected.join(", ")
            )));
        }
        Ok(rows)
    }

    pub fn load_panel(&self, panel: Panel) -> Result<PanelSurvey> {
        let source = SurveySource::Panel(panel);
        let rows = self.load_survey(source)?;
        let captured_at = match self.manifest.surveys.get(source.as_str()) {
            Some(at) => *at,
            None => self.file_mtime(&source.file_name())?,
        };
        Ok(PanelSurvey::new(panel, captured_at, rows)?)
    }

    fn file_mtime(&self, name: &str) -> Result<DateTime<Utc>> {
        let path = self.path(name);
        let modified = fs::metadata(&path)
            .and_then(|m| m.modified())
            .map_err(|e| StoreError::io(&path, e))?;
        Ok(modified.into())
    }

    pub fn save_survey(
        &mut self,
        source: SurveySource,
        rows: &[FactorDistribution],
        captured_at: DateTime<Utc>,
    ) -> Result<u64> {
        let scale = self.load_scale()?;
        let catalog = self.load_catalog()?;
        for d in rows {
            if d.fractions.len() != scale.len() {
                return Err(provrisk_core::Error::LengthMismatch {
                    what: format!("distribution of factor `{}`", d.factor_id),
                    expected: scale.len(),
                    found: d.fractions.len(),
                }
                .into());
            }
        }
        if !catalog.ids().eq(rows.iter().map(|d| &d.factor_id)) {
            return Err(StoreError::Integrity(
                "survey rows must list every catalog factor once, in catalog order".into(),
            ));
        }
        let path = self.path(&source.file_name());
        let text = formats::write_survey_csv(&path, rows)?;
        write_atomic(&path, text.as_bytes())?;
        self.manifest.survey_version += 1;
        self.manifest
            .surveys
            .insert(source.as_str().to_owned(), captured_at);
        self.save_manifest()?;
        Ok(self.manifest.survey_version)
    }

    pub fn save_panel(&mut self, survey: &PanelSurvey) -> Result<u64> {
        self.save_survey(
            SurveySource::Panel(survey.panel),
            survey.distributions(),
            survey.captured_at,
        )
    }

    fn read_weights_file(&self, path: &Path) -> Result<Option<StoredProfile>> {
        if !path.exists() {
            return Ok(None);
        }
        let file: WeightsFile = read_json(path)?;
        file.into_stored(path).map(Some)
    }

    /// Current weight profile, if one was ever saved. Its factors must match
    /// the catalog.
    pub fn load_weights(&self) -> Result<Option<StoredProfile>> {
        let Some(stored) = self.read_weights_file(&self.path(WEIGHTS))? else {
            return Ok(None);
        };
        let catalog = self.load_catalog()?;
        if !catalog.ids().eq(stored.profile.ids()) {
            return Err(StoreError::Integrity(format!(
                "weight profile v{} does not cover the current factor catalog; rebuild the weights",
                stored.version
            )));
        }
        Ok(Some(stored))
    }

    /// Like [`load_weights`](Self::load_weights) but a missing profile is an
    /// integrity error.
    pub fn require_weights(&self) -> Result<StoredProfile> {
        self.load_weights()?
            .ok_or_else(|| StoreError::Integrity("no weight profile has been built yet".into()))
    }

    /// An archived profile version.
    pub fn load_profile_version(&self, version: u64) -> Result<Option<StoredProfile>> {
        if version == self.weights_version && version > 0 {
            return self.read_weights_file(&self.path(WEIGHTS));
        }
        self.read_weights_file(&self.history_path(version))
    }

    fn profile_exists(&self, version: u64) -> bool {
        version > 0 && (version == self.weights_version || self.history_path(version).is_file())
    }

    /// Saves `profile` as the next version and archives it.
    pub fn save_weights(&mut self, profile: &WeightProfile) -> Result<StoredProfile> {
        let catalog = self.load_catalog()?;
        if !catalog.ids().eq(profile.ids()) {
            return Err(StoreError::Integrity(
                "weight profile must cover every catalog factor, in catalog order".into(),
            ));
        }
        let stored = StoredProfile {
            version: self.weights_version + 1,
            created_at: Some(Utc::now()),
            profile: profile.clone(),
        };
        let file = WeightsFile::from_stored(&stored);
        let history = self.root.join(HISTORY);
        fs::create_dir_all(&history).map_err(|e| StoreError::io(&history, e))?;
        // workspaces written by hand may lack an archive of the outgoing profile
        if self.weights_version > 0 && !self.history_path(self.weights_version).is_file() {
            let current = read_to_string(&self.path(WEIGHTS))?;
            write_atomic(&self.history_path(self.weights_version), current.as_bytes())?;
        }
        write_json(&self.history_path(stored.version), &file)?;
        write_json(&self.path(WEIGHTS), &file)?;
        self.weights_version = stored.version;
        Ok(stored)
    }

    /// All provider assessments; none when the table does not exist yet.
    pub fn load_assessments(&self) -> Result<Vec<ProviderAssessment>> {
        let path = self.path(ASSESSMENTS);
        if !path.exists() {
            return Ok(Vec::new());
        }
        let text = read_to_string(&path)?;
        let assessments = formats::parse_assessments_csv(&path, &text)?;
        let catalog = self.load_catalog()?;
        for a in &assessments {
            a.ensure_covers(catalog.ids())
                .map_err(|e| StoreError::Integrity(format!("provider `{}`: {e}", a.provider_id)))?;
        }
        Ok(assessments)
    }

    pub fn load_assessment(&self, provider: &str) -> Result<Option<ProviderAssessment>> {
        Ok(self
            .load_assessments()?
            .into_iter()
            .find(|a| a.provider_id.as_str() == provider))
    }

    /// Replaces the whole assessment table and logs a revision against the
    /// current weight profile.
    pub fn save_assessments(&mut self, assessments: &[ProviderAssessment]) -> Result<u64> {
        let changed = assessments.iter().map(|a| a.provider_id.clone()).collect();
        self.write_assessments(assessments, changed)
    }

    /// Inserts or replaces one provider's scores.
    pub fn upsert_assessment(&mut self, assessment: ProviderAssessment) -> Result<u64> {
        let mut all = self.load_assessments()?;
        let changed = vec![assessment.provider_id.clone()];
        match all
            .iter_mut()
            .find(|a| a.provider_id == assessment.provider_id)
        {
            Some(slot) => *slot = assessment,
            None => all.push(assessment),
        }
        self.write_assessments(&all, changed)
    }

    fn write_assessments(
        &mut self,
        assessments: &[ProviderAssessment],
        changed: Vec<ProviderId>,
    ) -> Result<u64> {
        if self.weights_version == 0 {
            return Err(StoreError::Integrity(
                "assessments need a weight profile to refer to; build the weights first".into(),
            ));
        }
        let catalog = self.load_catalog()?;
        for a in assessments {
            a.ensure_covers(catalog.ids())
                .map_err(|e| StoreError::Integrity(format!("provider `{}`: {e}", a.provider_id)))?;
        }
        let mut ids: Vec<&str> = assessments.iter().map(|a| a.provider_id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(provrisk_core::Error::DuplicateId {
                kind: "provider",
                id: w[0].to_owned(),
            }
            .into());
        }

        let path = self.path(ASSESSMENTS);
        let text = formats::write_assessments_csv(&path, assessments)?;
        write_atomic(&path, text.as_bytes())?;

        let rev = AssessmentRevision {
            revision: self.assessment_revision() + 1,
            at: Utc::now(),
            weights_version: self.weights_version,
            providers: changed,
        };
        let mut log = self.revisions.clone();
        log.push(rev);
        self.write_revision_log(&log)?;
        self.revisions = log;
        Ok(self.assessment_revision())
    }

    fn read_revision_log(&self) -> Result<Vec<AssessmentRevision>> {
        let path = self.path(REVISION_LOG);
        if !path.exists() {
            return Ok(Vec::new());
        }
        let text = read_to_string(&path)?;
        let mut out: Vec<AssessmentRevision> = Vec::new();
        for (i, line) in text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
        {
            let rev: AssessmentRevision = serde_json::from_str(line)
                .map_err(|e| StoreError::parse(&path, Some(i as u64 + 1), None, e.to_string()))?;
            if let Some(prev) = out.last() {
                if rev.revision <= prev.revision {
                    return Err(StoreError::Integrity(format!(
                        "revision log is not increasing at line {}",
                        i + 1
                    )));
                }
            }
            out.push(rev);
        }
        Ok(out)
    }

    fn write_revision_log(&self, log: &[AssessmentRevision]) -> Result<()> {
        let path = self.path(REVISION_LOG);
        let mut text = String::new();
        for rev in log {
            let line = serde_json::to_string(rev)
                .map_err(|e| StoreError::parse(&path, None, None, e.to_string()))?;
            text.push_str(&line);
            text.push('\n');
        }
        write_atomic(&path, text.as_bytes())
    }
}
