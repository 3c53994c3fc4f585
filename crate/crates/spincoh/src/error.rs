use std::process::ExitCode;

/// Everything the CLI can fail with, tagged by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad config, bad flags, unreadable input or unwritable output.
    #[error("{0}")]
    Config(String),
    /// The computation ran but a tolerance or identity check failed.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Failure(_) => 1,
            CliError::Config(_) => 2,
        })
    }
}

/// A core error at a named config field.
pub fn at_field(field: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {err}"))
}
