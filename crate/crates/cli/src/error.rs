use std::fmt;

use fasteer::{BootstrapError, EerError, FusionError, GaError, ScoreError};

/// Error families, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Compute(String),
    Network(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Compute(_) => 4,
            CliError::Network(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage error", m),
            CliError::Data(m) => ("data error", m),
            CliError::Compute(m) => ("computation error", m),
            CliError::Network(m) => ("network error", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl From<ScoreError> for CliError {
    fn from(e: ScoreError) -> Self {
        match e {
            ScoreError::InvalidParameter(m) => CliError::Usage(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<EerError<f64>> for CliError {
    fn from(e: EerError<f64>) -> Self {
        match e {
            EerError::InvalidConfig(m) => CliError::Usage(m),
            EerError::EmptyClass(_) => CliError::Data(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<FusionError> for CliError {
    fn from(e: FusionError) -> Self {
        match e {
            FusionError::DomainError(_) => CliError::Compute(e.to_string()),
            FusionError::Scores(s) => s.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<GaError> for CliError {
    fn from(e: GaError) -> Self {
        match e {
            GaError::InvalidConfig(m) => CliError::Usage(m),
            GaError::TooFewTuples { .. } => CliError::Data(e.to_string()),
            GaError::Fusion(f) => f.into(),
            GaError::Scores(s) => s.into(),
        }
    }
}

impl From<BootstrapError> for CliError {
    fn from(e: BootstrapError) -> Self {
        match e {
            BootstrapError::InvalidConfig(m) => CliError::Usage(m),
            BootstrapError::Scores(s) => s.into(),
            BootstrapError::PointEstimate(_) | BootstrapError::AllReplicatesFailed { .. } => {
                CliError::Compute(e.to_string())
            }
            BootstrapError::WorkerUnreachable { .. }
            | BootstrapError::WorkerFailed { .. }
            | BootstrapError::Protocol(_)
            | BootstrapError::Io(_) => CliError::Network(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
