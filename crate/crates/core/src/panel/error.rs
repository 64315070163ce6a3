use thiserror::Error;

use super::types::UnitRef;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PanelError {
    #[error("unknown unit {0}")]
    UnknownUnit(UnitRef),
    #[error("unknown program {0}")]
    UnknownProgram(usize),
    #[error("invalid panel spec: {0}")]
    InvalidSpec(String),
    #[error("invalid plant: {0}")]
    InvalidPlant(String),
    #[error("panel cannot be bound to plant: {0}")]
    Binding(String),
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequentialError {
    #[error("pulse sequence incomplete")]
    Incomplete,
    #[error("unknown pulse pattern: system group {system}, command group {command}")]
    UnknownPattern { system: usize, command: usize },
    #[error("malformed pulse sequence: {0}")]
    Malformed(&'static str),
    #[error("command {0:?} not in catalog")]
    NotInCatalog(UnitRef),
}
