use asdim::ErrorKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] asdim::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// 0 ok, 1 I/O, 2 verification, 3 hypothesis, 4 cap or resource,
    /// 5 malformed input or parameters.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Verification => 2,
                ErrorKind::Hypothesis => 3,
                ErrorKind::Resource => 4,
                ErrorKind::Malformed | ErrorKind::Precondition => 5,
                ErrorKind::Io => 1,
            },
            CliError::Io(_) => 1,
            CliError::Json(_) | CliError::Usage(_) => 5,
            CliError::Verification(_) => 2,
        }
    }
}
