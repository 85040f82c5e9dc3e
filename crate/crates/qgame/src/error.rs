use std::path::PathBuf;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON in {}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("malformed CSV in {}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Core(#[from] qgame_core::Error),
    #[error("{0} grid cell(s) failed")]
    CellFailures(usize),
    #[error("parallelization check failed at {0} grid point(s)")]
    VerifyFailed(usize),
}

impl HarnessError {
    /// 2 for bad input or an unusable output location, 3 for failed
    /// computations.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_)
            | HarnessError::Read { .. }
            | HarnessError::Write { .. }
            | HarnessError::Json { .. }
            | HarnessError::Csv { .. } => 2,
            HarnessError::CellFailures(_) | HarnessError::VerifyFailed(_) => 3,
            HarnessError::Core(_) => 3,
        }
    }
}
