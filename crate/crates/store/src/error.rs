use std::path::PathBuf;

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}{}: {message}", .path.display(), locus(.line, .field))]
    Parse {
        path: PathBuf,
        line: Option<u64>,
        field: Option<String>,
        message: String,
    },

    #[error("{}: unsupported schema version {found} (expected {supported})", .path.display())]
    Version {
        path: PathBuf,
        found: u64,
        supported: u64,
    },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error(transparent)]
    Domain(#[from] provrisk_core::Error),
}

fn locus(line: &Option<u64>, field: &Option<String>) -> String {
    match (line, field) {
        (Some(l), Some(f)) => format!(":{l} (field `{f}`)"),
        (Some(l), None) => format!(":{l}"),
        (None, Some(f)) => format!(" (field `{f}`)"),
        (None, None) => String::new(),
    }
}

impl StoreError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        path: impl Into<PathBuf>,
        line: Option<u64>,
        field: Option<&str>,
        message: impl Into<String>,
    ) -> Self {
        Self::Parse {
            path: path.into(),
            line,
            field: field.map(str::to_owned),
            message: message.into(),
        }
    }

    pub fn is_not_found(&self) -> bool {
        matches!(self, Self::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound)
    }
}
