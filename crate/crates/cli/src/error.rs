use std::io;
use std::path::PathBuf;

use atomphoton_core::entangle::EntangleError;
use atomphoton_core::spectra::SpectraError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown line `{name}`; catalog has: {}", available.join(", "))]
    UnknownLine {
        name: String,
        available: Vec<String>,
    },
    #[error("bad catalog {origin}: {message}")]
    Catalog { origin: String, message: String },
    #[error("invalid arguments: {0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Entangle(#[from] EntangleError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for anything wrong with the input, 3 for file-system failures,
    /// 1 when the numerics themselves fail.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::UnknownLine { .. }
            | Self::Catalog { .. }
            | Self::Invalid(_)
            | Self::Spectra(_) => 2,
            Self::Io { .. } => 3,
            Self::Entangle(_) => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
