use thiserror::Error;

use crate::model::ElementId;
use crate::validate::ValidationReport;

/// Construction-time violations of the model's value types.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid id {0:?}: expected letters, digits, '_' or '-'")]
    InvalidId(String),
    #[error("rank {0} is outside 1..=10")]
    RankOutOfRange(i64),
    #[error("frequency {numerator}/{denominator} must have positive numerator and denominator")]
    InvalidFrequency { numerator: u64, denominator: u64 },
    #[error("unknown element {0}")]
    UnknownElement(ElementId),
    #[error("unknown token {0:?}")]
    UnknownToken(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("failure mode {0} has no effect with a severity rank or class")]
    MissingSeverity(ElementId),
    #[error("failure mode {0} has no cause with an occurrence rank or frequency")]
    MissingOccurrence(ElementId),
    #[error("failure mode {0} has no control plan to derive detection from")]
    MissingDetection(ElementId),
    #[error("unknown failure mode {0}")]
    UnknownFailureMode(ElementId),
    #[error("unknown element {0}")]
    UnknownElement(ElementId),
}

impl AnalysisError {
    /// The failure mode the error is attached to, when there is one.
    pub fn failure_mode(&self) -> Option<&ElementId> {
        match self {
            AnalysisError::MissingSeverity(id)
            | AnalysisError::MissingOccurrence(id)
            | AnalysisError::MissingDetection(id)
            | AnalysisError::UnknownFailureMode(id) => Some(id),
            AnalysisError::UnknownElement(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProcedureError {
    #[error("model is not ready for analysis ({} error(s))", .0.error_count())]
    ValidationFailed(ValidationReport),
    #[error("step {step}: {source}")]
    Analysis {
        step: u8,
        #[source]
        source: AnalysisError,
    },
}
