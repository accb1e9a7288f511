use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, parameters or configuration.
    #[error("usage: {0}")]
    Usage(String),

    /// A checked inequality or invariant failed.
    #[error("invariant violated: {0}")]
    Violation(String),

    #[error("budget: {0}")]
    Budget(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
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

impl From<tmlod_core::Error> for CliError {
    fn from(e: tmlod_core::Error) -> Self {
        match e {
            tmlod_core::Error::InvalidArgument(m) => CliError::Usage(m),
            tmlod_core::Error::Internal(m) => CliError::Violation(m),
            b @ tmlod_core::Error::BudgetExceeded { .. } => CliError::Budget(b.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Format(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Format(e.to_string())
    }
}
