//! Serialized artifacts, the consolidated analysis report and the command
//! implementations behind the `profseq` binary.
//!
//! Every CSV artifact `name.csv` is written next to a `name.meta.json`
//! sidecar that records the tool version, the artifact kind, the catalog it
//! was produced under (source and SHA-256 of its content) and the list of
//! books with their page counts. Readers use the sidecar to recover books
//! with no rows and to refuse mixing artifacts from different catalogs.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::catalog::CatalogError;
use crate::divergence::MetricsError;
use crate::scanner::ScanError;

pub mod analysis;
pub mod artifacts;
pub mod commands;

pub use analysis::{build_report, AnalysisReport};
pub use artifacts::{ArtifactMeta, BookMeta, Provenance};

pub const TOOL_NAME: &str = "profseq";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Timestamp recorded when reproducible output is requested.
pub const REPRO_TIMESTAMP: &str = "1970-01-01T00:00:00Z";

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{}: line {line}: {message}", path.display())]
    MalformedCsv { path: PathBuf, line: u64, message: String },
    #[error("{}: {message}", path.display())]
    MalformedJson { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("catalog provenance mismatch: {left} was produced with catalog {left_digest}, {right} with {right_digest}")]
    ProvenanceMismatch {
        left: String,
        left_digest: String,
        right: String,
        right_digest: String,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl Error {
    /// Process exit status: 1 usage, 2 I/O, 3 validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Io { .. } => 2,
            Error::Catalog(_)
            | Error::MalformedCsv { .. }
            | Error::MalformedJson { .. }
            | Error::Invalid(_)
            | Error::ProvenanceMismatch { .. }
            | Error::Metrics(_) => 3,
        }
    }

    pub(crate) fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }
}

impl From<ScanError> for Error {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::RootMissing(path) => Error::Io {
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "source root does not exist"),
                path,
            },
            ScanError::Walk { path, message } => Error::Io {
                path,
                source: std::io::Error::other(message),
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Rounds half away from zero to two decimals.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Two-decimal rendering used by the printed tables (`3.125` gives `3.13`).
pub fn fmt2(x: f64) -> String {
    format!("{:.2}", round2(x))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&parent).map_err(|e| Error::io(&parent, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
