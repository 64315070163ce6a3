use thiserror::Error;

use crate::panel::{Family, PanelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Panel(#[from] PanelError),
    #[error("step {step}: {message}")]
    InvalidStep { step: usize, message: String },
    #[error("step {step}: {what} is not possible on a {family} panel")]
    Unsupported {
        step: usize,
        family: Family,
        what: &'static str,
    },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid time model parameters: {0}")]
    InvalidParams(String),
    #[error("ratio undefined: denominator log has zero {0}")]
    UndefinedRatio(&'static str),
}
