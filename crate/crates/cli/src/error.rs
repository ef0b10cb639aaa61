use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{phase} failed: {source}")]
    Runtime {
        phase: &'static str,
        #[source]
        source: anyhow::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn runtime(phase: &'static str, source: impl Into<anyhow::Error>) -> Self {
        CliError::Runtime {
            phase,
            source: source.into(),
        }
    }

    /// 1 for configuration errors, 2 for failures while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime { .. } => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
