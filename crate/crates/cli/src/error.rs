use std::path::PathBuf;

/// Everything the driver can fail with, mapped onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Engine(#[from] shaomega_core::Error),
    #[error("self-test failed: {0} check(s)")]
    SelftestFailed(usize),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_HYPOTHESIS: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use shaomega_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Validation(_) => EXIT_INVALID,
            CliError::Io { .. } => EXIT_IO,
            CliError::SelftestFailed(_) => EXIT_INTERNAL,
            CliError::Engine(e) => match e {
                E::ComplexityLimitExceeded { .. } => EXIT_BUDGET,
                E::HypothesisViolated(_) => EXIT_HYPOTHESIS,
                E::InternalInconsistency(_) | E::ReciprocityViolation(_) | E::Overflow(_) => EXIT_INTERNAL,
                _ => EXIT_INVALID,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
