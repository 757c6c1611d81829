use zwm_core::ZwmError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Spec(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] ZwmError),
    #[error("golden comparison failed:\n{0}")]
    GoldenMismatch(String),
}

impl CliError {
    /// Process exit code: 2 for invalid input, 3 when the truncated space is
    /// too small, 1 for a failed golden comparison.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ZwmError::TruncationLoss { .. } | ZwmError::Sizing(_)) => 3,
            CliError::GoldenMismatch(_) => 1,
            CliError::Spec(_) | CliError::Io(_) | CliError::Core(_) => 2,
        }
    }
}
