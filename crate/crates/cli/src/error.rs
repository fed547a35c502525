use std::process::ExitCode;

use qms_core::feasibility::FeasibilityError;
use qms_core::io::IoError;
use qms_core::majorization::MajorizationError;
use qms_core::quantum::QuantumError;
use qms_core::steering::SteeringError;
use qms_core::tensor::TensorError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed configuration, or a scenario that does not
    /// describe valid objects.
    #[error("config: {0}")]
    Config(String),

    #[error("size limit: {0}")]
    SizeLimit(String),

    /// A property the computation relies on (monotonicity along a family)
    /// failed.
    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("output: {0}")]
    Output(#[from] std::io::Error),

    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::SizeLimit(_) => 3,
            Self::Assumption(_) => 4,
            Self::Output(_) | Self::Failure(_) => 1,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<TensorError> for CliError {
    fn from(e: TensorError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<MajorizationError> for CliError {
    fn from(e: MajorizationError) -> Self {
        match e {
            MajorizationError::PoolTooLarge { .. } => Self::SizeLimit(e.to_string()),
            MajorizationError::Linalg(_) => Self::Failure(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<SteeringError> for CliError {
    fn from(e: SteeringError) -> Self {
        match e {
            SteeringError::Majorization(m) => m.into(),
            SteeringError::NonMonotone { .. } | SteeringError::ViolatedAtZero => Self::Assumption(e.to_string()),
            SteeringError::Extrapolation(_) => Self::Failure(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<FeasibilityError> for CliError {
    fn from(e: FeasibilityError) -> Self {
        match e {
            FeasibilityError::NonMonotone { .. } => Self::Assumption(e.to_string()),
            FeasibilityError::Tensor(_)
            | FeasibilityError::Quantum(_)
            | FeasibilityError::InvalidJoints(_)
            | FeasibilityError::Signalling { .. } => Self::Config(e.to_string()),
            _ => Self::Failure(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(CliError::from(SteeringError::NonMonotone { eta: 0.3 }).code(), 4);
        assert_eq!(CliError::from(SteeringError::ViolatedAtZero).code(), 4);
        assert_eq!(CliError::from(FeasibilityError::NonMonotone { visibility: 0.5 }).code(), 4);
        let big = MajorizationError::PoolTooLarge { size: 14, limit: 12 };
        assert_eq!(CliError::from(SteeringError::Majorization(big.clone())).code(), 3);
        assert_eq!(CliError::from(big).code(), 3);
        assert_eq!(CliError::from(MajorizationError::EmptyPool).code(), 2);
        assert_eq!(CliError::from(FeasibilityError::Unexpected("unbounded")).code(), 1);
    }
}
