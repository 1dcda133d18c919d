//! Command implementations behind the `ovc` binary: config loading, CSV
//! table output and plotting.

pub mod commands;
pub mod config;
pub mod plot;
pub mod table;

use std::fmt;

/// CLI failure, carrying the process exit code contract:
/// 2 config error, 3 validation error, 4 numerical error.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self {
            CliError::Config(_) => "config error",
            CliError::Validation(_) => "validation error",
            CliError::Numerical(_) => "numerical error",
        };
        write!(f, "{kind}: {}", self.message())
    }
}

impl std::error::Error for CliError {}

impl From<overcoupled::Error> for CliError {
    fn from(error: overcoupled::Error) -> Self {
        let message = format!("{}: {error}", error.name());
        if error.is_validation() {
            CliError::Validation(message)
        } else {
            CliError::Numerical(message)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use overcoupled::Error;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(Error::NotPositiveDefinite).exit_code(), 3);
        assert_eq!(CliError::from(Error::KOutOfRange(1.5)).exit_code(), 3);
        assert_eq!(CliError::from(Error::EmptySpectrum).exit_code(), 4);
        assert_eq!(
            CliError::from(Error::SingularAtFrequency { omega: 1.0 }).exit_code(),
            4
        );
        assert_eq!(
            CliError::from(Error::UnmatchedPeak {
                peaks: 3,
                visible_modes: 2,
                drive_index: 1
            })
            .exit_code(),
            4
        );
    }

    #[test]
    fn core_errors_carry_their_invariant_name() {
        let err = CliError::from(Error::NonSymmetricCoupling {
            row: 0,
            col: 1,
            upper: 0.2,
            lower: 0.3,
        });
        assert!(err.message().contains("NonSymmetricCoupling"));
    }
}
