use std::path::PathBuf;

/// Failures that stop a run before a pass/fail verdict exists. All map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] gphase_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl RunError {
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "validation",
            RunError::Core(gphase_core::Error::StepGuard { .. }) => "step_guard",
            RunError::Core(_) => "computation",
            RunError::Io { .. } => "io",
            RunError::Parse { .. } => "parse",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io { path: path.into(), source }
    }
}
