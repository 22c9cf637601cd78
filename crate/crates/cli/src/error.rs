use std::path::PathBuf;

use geomatch::GeomError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
    #[error("{}:{line}: {message}", path.display())]
    Row {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("{0}")]
    Invalid(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io { .. } => "io",
            Self::Manifest { .. } => "manifest",
            Self::Row { .. } => "row",
            Self::Geom(_) => "geometry",
            Self::Invalid(_) => "invalid-argument",
        }
    }

    /// One-line JSON error record for scripts.
    pub fn record(&self) -> Value {
        let (file, line) = match self {
            Self::Io { path, .. } | Self::Manifest { path, .. } => (Some(path.display().to_string()), None),
            Self::Row { path, line, .. } => (Some(path.display().to_string()), Some(*line)),
            _ => (None, None),
        };
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "file": file,
                "line": line,
            }
        })
    }
}
