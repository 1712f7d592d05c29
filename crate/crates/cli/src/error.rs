use mpr_core::MprError;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{context}: {source}")]
    Model { context: String, source: MprError },
    #[error("{0}")]
    NotConverged(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 0 success, 1 usage/parse/I/O, 2 convergence, 3 numerical failure.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::NotConverged(_) => 2,
            CliError::Model { source, .. } => match source {
                MprError::NotConverged | MprError::TooManyFailures { .. } => 2,
                MprError::RankDeficient { .. }
                | MprError::Overflow { .. }
                | MprError::SingularInformation
                | MprError::NotPositiveDefinite
                | MprError::SingularHazard
                | MprError::UnreachableCensoring(_)
                | MprError::SelectionBound(_)
                | MprError::NegativeLrStatistic(_) => 3,
                _ => 1,
            },
        })
    }
}

pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, MprError> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Model {
            context: what.into(),
            source,
        })
    }
}
