use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed flags or config file.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Domain(#[from] cvclone::Error),

    /// Parameters that parse but make no sense (empty grid, min > max, …).
    #[error("{0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("sample check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
