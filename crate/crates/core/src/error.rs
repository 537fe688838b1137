use crate::panels::DistributionDiagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what}: expected {expected} values, found {found}")]
    LengthMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("factor sets differ (missing: [{}], extra: [{}])", .missing.join(", "), .extra.join(", "))]
    FactorSetMismatch {
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("unknown {kind} id `{id}`")]
    UnknownId { kind: &'static str, id: String },

    /// A value broke a domain invariant; `invariant` names the rule.
    #[error("{invariant}: {detail}")]
    Invariant {
        invariant: &'static str,
        detail: String,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{} distribution(s) failed validation under the strict policy", .0.len())]
    Rejected(Vec<DistributionDiagnostic>),
}

impl Error {
    pub(crate) fn invariant(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            invariant,
            detail: detail.into(),
        }
    }

    pub(crate) fn length(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::LengthMismatch {
            what: what.into(),
            expected,
            found,
        }
    }

    /// True for errors caused by mismatched shapes or identifiers rather than
    /// by out-of-domain values.
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            Error::LengthMismatch { .. }
                | Error::FactorSetMismatch { .. }
                | Error::DuplicateId { .. }
                | Error::UnknownId { .. }
        )
    }
}
