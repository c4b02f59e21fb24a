use eps_core::EpsError;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A check against a tolerance did not hold (exit code 1).
    #[error("{0}")]
    Tolerance(String),

    /// Bad, missing or inconsistent input (exit code 2).
    #[error("{0}")]
    Config(String),

    /// A computation produced a non-finite value (exit code 3).
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Tolerance(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn missing_section(name: &str, command: &str) -> Self {
        CliError::Config(format!(
            "`{command}` needs the `{name}` section in the config"
        ))
    }
}

impl From<EpsError> for CliError {
    fn from(e: EpsError) -> Self {
        match e {
            EpsError::Numerical { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(format!("csv error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
