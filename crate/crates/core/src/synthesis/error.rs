use thiserror::Error;

use super::choose::Rejection;
use crate::panel::PanelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no feasible panel: {}", describe(.0))]
    NoFeasiblePanel(Vec<Rejection>),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

fn describe(rejections: &[Rejection]) -> String {
    rejections
        .iter()
        .map(|r| format!("{} ({})", r.family, r.violated.join("; ")))
        .collect::<Vec<_>>()
        .join(", ")
}
