//! Failures of a CLI run and their exit statuses.

use std::path::PathBuf;

use thiserror::Error;

/// Exit status of a run whose checks all passed.
pub const EXIT_SUCCESS: u8 = 0;
/// Exit status of a run in which some contract bound was not met.
pub const EXIT_CHECK_FAILURE: u8 = 1;
/// Exit status for invalid configuration, arguments or inputs.
pub const EXIT_CONFIG_ERROR: u8 = 2;
/// Exit status for non-convergent quadrature, SVD or fit failures.
pub const EXIT_NUMERIC_FAILURE: u8 = 3;

/// A run that could not produce its artifacts.
#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration file could not be read.
    #[error("cannot read {path}: {source}")]
    ReadInput {
        path: PathBuf,
        source: std::io::Error,
    },

    /// The configuration or scenario file is not valid JSON for its schema.
    #[error("{path}: {source}")]
    ParseInput {
        path: PathBuf,
        source: serde_json::Error,
    },

    /// Argument or configuration values are inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The library rejected an input.
    #[error("{0}")]
    Invalid(lame_ghp::Error),

    /// A numerical kernel failed.
    #[error("{0}")]
    Numeric(lame_ghp::Error),

    /// An artifact could not be written.
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    /// An artifact could not be serialised.
    #[error("cannot serialise output: {0}")]
    Serialise(String),
}

impl CliError {
    /// Exit status for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Numeric(_) => EXIT_NUMERIC_FAILURE,
            _ => EXIT_CONFIG_ERROR,
        }
    }
}

impl From<lame_ghp::Error> for CliError {
    fn from(e: lame_ghp::Error) -> Self {
        use lame_ghp::Error as E;
        match e {
            E::Numeric(_)
            | E::BesselDomain { .. }
            | E::CoefficientOverflow { .. }
            | E::GammaOverflow { .. } => Self::Numeric(e),
            _ => Self::Invalid(e),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Serialise(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Serialise(e.to_string())
    }
}

/// Result alias of the CLI.
pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_statuses() {
        let numeric = CliError::from(lame_ghp::Error::Numeric("svd".into()));
        assert_eq!(numeric.exit_code(), EXIT_NUMERIC_FAILURE);
        let domain = CliError::from(lame_ghp::Error::BesselDomain {
            value: 1e3,
            max: 60.0,
        });
        assert_eq!(domain.exit_code(), EXIT_NUMERIC_FAILURE);
        let medium = CliError::from(lame_ghp::Error::InvalidMedium("mu".into()));
        assert_eq!(medium.exit_code(), EXIT_CONFIG_ERROR);
        assert_eq!(
            CliError::from(lame_ghp::Error::CollinearSegments).exit_code(),
            EXIT_CONFIG_ERROR
        );
        assert_eq!(CliError::Config("x".into()).exit_code(), EXIT_CONFIG_ERROR);
    }
}
