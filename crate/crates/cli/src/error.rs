use thiserror::Error;

/// Exit status for input problems (bad files, bad parameters, usage).
pub const EXIT_INPUT: i32 = 2;
/// Exit status when a cached law does not fit the requested test.
pub const EXIT_LAW_MISMATCH: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: cannot parse `{content}` as a finite number")]
    Parse { line: usize, content: String },
    #[error("need at least 4 observations, found {0}")]
    TooFewObservations(usize),
    #[error("cache file: {0}")]
    Cache(String),
    #[error("scenario file: {0}")]
    Scenario(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ucpd_core::Error),
}

impl CliError {
    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ucpd_core::Error::LawMismatch(_)) => EXIT_LAW_MISMATCH,
            _ => EXIT_INPUT,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
