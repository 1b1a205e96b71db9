use std::fmt;

/// Command failure, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input files, flags or data. Exit code 1.
    Input(anyhow::Error),
    /// Problems already reported line by line (validation, batch errors). Exit code 1.
    Reported,
    /// Unexpected failure, including failures writing outputs. Exit code 2.
    Internal(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Reported => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) | CliError::Internal(e) => write!(f, "{e:#}"),
            CliError::Reported => f.write_str("errors reported above"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T = ()> = Result<T, CliError>;

/// Tags errors from reading inputs or writing outputs.
pub trait Classify<T> {
    fn input(self) -> CliResult<T>;
    fn internal(self) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> CliResult<T> {
        self.map_err(|e| CliError::Input(e.into()))
    }

    fn internal(self) -> CliResult<T> {
        self.map_err(|e| CliError::Internal(e.into()))
    }
}
