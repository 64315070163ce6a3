use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::io::canonical::fixed6;
use crate::panel::{EntryKey, Switch, UnitRef};

/// One scripted operator task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case", deny_unknown_fields)]
pub enum Step {
    /// Confirm that a unit is in the expected state.
    VerifyUnit { unit: UnitRef, expected: Switch },
    /// Command a unit and confirm the result.
    SetUnit { unit: UnitRef, desired: Switch },
    /// Wait for a program entry to come due, then check the units of its
    /// program step (issuing it manually if it fails to auto-issue).
    AwaitProgramLabel { program: usize, entry: usize },
    /// Check the state of every unit.
    FullStatusSweep,
    Wait {
        #[serde(with = "fixed6")]
        seconds: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub seed: u64,
    pub steps: Vec<Step>,
    /// Program entries that fail to auto-issue.
    #[serde(default)]
    pub faults: BTreeSet<EntryKey>,
}

impl Scenario {
    pub fn new(id: &str, steps: Vec<Step>) -> Self {
        Self {
            id: id.to_string(),
            description: String::new(),
            seed: 0,
            steps,
            faults: BTreeSet::new(),
        }
    }
}
