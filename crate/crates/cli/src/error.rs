use std::path::PathBuf;

/// Everything that makes a run unusable. All variants map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("{path}: {key}: {source}")]
    Invalid { path: PathBuf, key: String, source: Box<helixforms::Error> },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(Box<helixforms::Error>),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl From<helixforms::Error> for CliError {
    fn from(e: helixforms::Error) -> Self {
        CliError::Compute(Box::new(e))
    }
}
