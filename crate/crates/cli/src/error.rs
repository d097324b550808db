use thiserror::Error;

/// Failure classes, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Environment(String),
    #[error("{0}")]
    PartialSweep(String),
    #[error("{0}")]
    Mismatch(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Environment(_) => 2,
            Failure::PartialSweep(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Failure::Environment(format!("{}: {err}", path.display()))
    }
}

impl From<qbattery::Error> for Failure {
    fn from(err: qbattery::Error) -> Self {
        use qbattery::Error as E;
        match err {
            E::InvalidParameter(_)
            | E::OutOfRange(_)
            | E::SpaceMismatch(_)
            | E::TooFewPoints(_)
            | E::NonPositive { .. } => Failure::Usage(err.to_string()),
            E::DimensionGuard { .. }
            | E::DimensionMismatch { .. }
            | E::Eigensolver(_)
            | E::NegativeVariance(_) => Failure::Environment(err.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;
