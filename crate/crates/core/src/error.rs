use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error classes. The CLI maps these onto its exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Invariant,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("{path}: row {row}: {reason}")]
    Format {
        path: PathBuf,
        row: usize,
        reason: String,
    },

    #[error("{path}: unsupported schema version `{found}` (this build reads major {supported})")]
    SchemaVersion {
        path: PathBuf,
        found: String,
        supported: u32,
    },

    #[error("{path}: checksum mismatch (manifest {expected}, file {actual})")]
    Checksum {
        path: PathBuf,
        expected: String,
        actual: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn format(path: impl Into<PathBuf>, row: usize, reason: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            row,
            reason: reason.to_string(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter { .. }
            | Error::Format { .. }
            | Error::SchemaVersion { .. }
            | Error::Checksum { .. } => ErrorKind::Validation,
            Error::Io { .. } => ErrorKind::Io,
            Error::Invariant(_) => ErrorKind::Invariant,
        }
    }
}
