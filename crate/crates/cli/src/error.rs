use thiserror::Error;

use crate::config::Origin;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {origin}: {key}: {reason}")]
    Config {
        key: String,
        origin: Origin,
        reason: String,
    },

    #[error("numerical failure: {0}")]
    Numerical(#[from] spectral_interference::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn config(key: &str, origin: Origin, reason: &str) -> Self {
        Self::Config {
            key: key.to_string(),
            origin,
            reason: reason.to_string(),
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 0 success, 1 validation failure, 2 config error, 3 numerical or i/o failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 1,
            Self::Config { .. } => 2,
            Self::Numerical(_) | Self::Io { .. } => 3,
        }
    }
}
