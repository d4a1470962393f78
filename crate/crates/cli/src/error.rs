use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const PRECISION: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] extkp_core::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("format: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use extkp_core::Error as E;
        match self {
            CliError::Core(E::InsufficientPrecision(_)) => exit::PRECISION,
            CliError::Core(E::InvariantViolation(_)) => exit::CHECK_FAILED,
            CliError::Core(E::Domain(_) | E::Configuration(_)) => exit::USAGE,
            CliError::Usage(_) | CliError::Format(_) => exit::USAGE,
            CliError::Io(_) => exit::CHECK_FAILED,
        }
    }
}
