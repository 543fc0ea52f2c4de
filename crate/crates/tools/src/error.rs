use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Model(#[from] rateq_core::Error),
    #[error("{0}")]
    Check(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    /// 1 for a failed invariant or check, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Check(_) => 1,
            Self::Model(rateq_core::Error::Invariant(_) | rateq_core::Error::Contract(_)) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> Self {
        let path = path.into();
        move |source| Self::Csv { path, source }
    }
}
