use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] tempstep_core::Error),

    #[error("{0}")]
    Invariant(String),

    #[error("{0}")]
    AllPointsFailed(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("self-test failed: {0}")]
    SelftestFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SelftestFailed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(tempstep_core::Error::InvalidParameter { .. }) => 2,
            CliError::Numerical(_) | CliError::Invariant(_) | CliError::AllPointsFailed(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
