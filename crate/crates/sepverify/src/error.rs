use thiserror::Error;

/// Failures of the command-line layer, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum AppError {
    /// Bad flags, parameters out of domain, malformed input files.
    #[error("usage error: {0}")]
    Usage(String),
    /// A numerical method did not reach an optimal answer.
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl AppError {
    pub fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }

    /// 2 for usage errors, 3 for solver and output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Solver(_) | AppError::Io(_) => 3,
        }
    }
}

impl From<sepverify_core::Error> for AppError {
    fn from(e: sepverify_core::Error) -> Self {
        use sepverify_core::Error as E;
        match e {
            E::NotOptimal { .. } => AppError::Solver(e.to_string()),
            other => AppError::Usage(other.to_string()),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
