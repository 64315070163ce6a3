use serde::Serialize;
use thiserror::Error;

use super::digest::input_digest;
use super::documents::{parse_document, serialize_document, ParseError, SessionInputs, SessionRecord};
use crate::operator::{run_scenario, OperatorError};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Runs the scenario and packages the result with its input digest.
pub fn record_session(inputs: SessionInputs) -> Result<SessionRecord, OperatorError> {
    let log = run_scenario(&inputs.spec, &inputs.plant, &inputs.scenario, &inputs.params)?;
    Ok(SessionRecord {
        digest: input_digest(&inputs),
        inputs,
        log,
    })
}

pub fn session_text(record: &SessionRecord) -> String {
    serialize_document(record).expect("session logs hold only finite numbers")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayVerdict {
    /// Stored digest matches the embedded inputs.
    pub digest_matches: bool,
    /// Re-running produced the saved bytes exactly.
    pub identical: bool,
    /// 1-based line of the first differing line, if any.
    pub first_difference: Option<usize>,
    pub digest: String,
}

impl ReplayVerdict {
    pub fn ok(&self) -> bool {
        self.digest_matches && self.identical
    }
}

/// Re-runs a saved session and compares the regenerated file byte for byte.
pub fn replay_session(text: &str) -> Result<ReplayVerdict, ReplayError> {
    let saved: SessionRecord = parse_document(text)?;
    let digest = input_digest(&saved.inputs);
    let digest_matches = digest == saved.digest;
    let fresh = session_text(&record_session(saved.inputs)?);
    let identical = fresh == text;
    let first_difference = if identical {
        None
    } else {
        let mut a = fresh.lines();
        let mut b = text.lines();
        let mut line = 1;
        loop {
            match (a.next(), b.next()) {
                (Some(x), Some(y)) if x == y => line += 1,
                _ => break Some(line),
            }
        }
    };
    Ok(ReplayVerdict {
        digest_matches,
        identical,
        first_difference,
        digest,
    })
}
