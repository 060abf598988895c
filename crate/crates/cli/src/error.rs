use thiserror::Error;

/// Exit status for bad flags or flag combinations.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failures inside the numerics.
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit status for unreadable inputs and unwritable outputs.
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Numerical(driven_tls::Error),

    #[error("{0}")]
    Input(String),

    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Numerical(_) => EXIT_NUMERICAL,
            Self::Input(_) | Self::Output { .. } => EXIT_INPUT,
        }
    }
}

impl From<driven_tls::Error> for CliError {
    fn from(e: driven_tls::Error) -> Self {
        match e {
            driven_tls::Error::Load(load) => Self::Input(load.to_string()),
            other => Self::Numerical(other),
        }
    }
}

impl From<driven_tls::multilevel::LoadError> for CliError {
    fn from(e: driven_tls::multilevel::LoadError) -> Self {
        Self::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
