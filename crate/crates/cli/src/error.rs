use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical error: {0}")]
    Numerical(stark_readout::Error),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// 1 for configuration and I/O problems, 2 for numerical failures, 3 for failed self-checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } => 1,
            Self::Numerical(_) => 2,
            Self::Validation(_) => 3,
        }
    }
}

impl From<stark_readout::Error> for CliError {
    fn from(e: stark_readout::Error) -> Self {
        match e {
            stark_readout::Error::InvalidParameter(msg) => Self::Config(msg),
            other => Self::Numerical(other),
        }
    }
}
