use thiserror::Error;

/// Exit status for parse, validation and compute-domain failures.
pub const EXIT_INVALID: u8 = 2;
/// Exit status for numerical non-convergence.
pub const EXIT_NON_CONVERGENT: u8 = 3;
/// Exit status for file-system failures.
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("unit mismatch at `{path}`: expected {expected}")]
    UnitMismatch { path: String, expected: String },

    #[error(transparent)]
    Species(#[from] casq_core::species::SpeciesError),

    #[error("invalid scenario at `{path}`: {source}")]
    Invalid {
        path: String,
        #[source]
        source: casq_core::Error,
    },

    #[error(transparent)]
    Compute(#[from] casq_core::Error),

    #[error("bad parameter path `{path}`: {reason}")]
    BadParameterPath { path: String, reason: String },

    #[error("invalid sweep: {0}")]
    Sweep(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{failed} result(s) did not converge")]
    NonConvergent { failed: usize },

    #[error("{failed} selftest criteria failed")]
    SelftestFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Species(casq_core::species::SpeciesError::Io { .. }) => EXIT_IO,
            CliError::NonConvergent { .. } | CliError::SelftestFailed { .. } => EXIT_NON_CONVERGENT,
            CliError::Compute(e) | CliError::Invalid { source: e, .. } if e.is_non_convergence() => {
                EXIT_NON_CONVERGENT
            }
            _ => EXIT_INVALID,
        }
    }

    pub fn io(path: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_string(),
            message: err.to_string(),
        }
    }
}
