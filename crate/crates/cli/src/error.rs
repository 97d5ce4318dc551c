//! Errors of the front end and their exit codes.

use gawcga::Error;
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_CONSTRAINT: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_CONSTRUCTION: u8 = 4;
pub const EXIT_PREDICATE: u8 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected predicate failed: {0}")]
    Predicate(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => EXIT_CONFIG,
            CliError::Predicate(_) => EXIT_PREDICATE,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

/// Audit failures map to 2, numerical failures to 3, rejected constructions to 4,
/// everything that a corrected config would avoid to 1.
pub fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::ConstraintViolation { .. } | Error::SlackViolated(_) | Error::WeakSelectionImpossible => EXIT_CONSTRAINT,
        Error::NonConvergence { .. } | Error::NoRoot { .. } => EXIT_SOLVER,
        Error::ConstructionInvalid(_) => EXIT_CONSTRUCTION,
        Error::ZeroElement
        | Error::ExponentOutOfRange(_)
        | Error::HorizonExceeded { .. }
        | Error::IndexOutOfDomain { .. }
        | Error::NonFinite { .. }
        | Error::InvalidParameter(_)
        | Error::InvalidSequence(_)
        | Error::HypothesisViolated(_)
        | Error::WitnessInvalid(_)
        | Error::EmptyDictionary => EXIT_CONFIG,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gawcga::Constraint;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 1);
        assert_eq!(CliError::from(Error::ExponentOutOfRange(1.0)).exit_code(), 1);
        assert_eq!(CliError::from(Error::ConstraintViolation { step: 1, which: Constraint::Select, margin: -1.0 }).exit_code(), 2);
        assert_eq!(CliError::from(Error::NonConvergence { iterations: 1, certificate: 1.0, residual: 1.0 }).exit_code(), 3);
        assert_eq!(CliError::from(Error::ConstructionInvalid("gap".into())).exit_code(), 4);
        assert_eq!(CliError::Predicate("floor".into()).exit_code(), 5);
    }
}
