use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("{context}: {source}")]
    Numerical {
        context: &'static str,
        #[source]
        source: tmslab_core::Error,
    },
    #[error("thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }
}

/// Attaches a context string to core failures.
pub trait Context<T> {
    fn context(self, what: &'static str) -> Result<T, LabError>;
}

impl<T> Context<T> for Result<T, tmslab_core::Error> {
    fn context(self, what: &'static str) -> Result<T, LabError> {
        self.map_err(|source| LabError::Numerical { context: what, source })
    }
}
