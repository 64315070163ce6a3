use serde::{Deserialize, Serialize};

use crate::io::canonical::fixed6;
use crate::panel::{ButtonEvent, CommandEmission, PlantState, PressOutcome, ProgramEvent, UnitRef};

/// Operation classes: K checks unit state, U issues a command, O is a sweep
/// of every selector on a compressed field, L is a selector press made to
/// check status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpClass {
    K,
    U,
    O,
    L,
}

impl OpClass {
    pub const ALL: [OpClass; 4] = [OpClass::K, OpClass::U, OpClass::O, OpClass::L];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckTarget {
    Unit { unit: UnitRef },
    Row { row: String },
    Screen { screen: usize },
    Entry { program: usize, entry: usize },
    Confirmation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Detail {
    Press {
        event: ButtonEvent,
        outcome: PressOutcome,
        emissions: Vec<CommandEmission>,
    },
    Check {
        target: CheckTarget,
        /// Cells looked at.
        cells: Vec<usize>,
        /// Those of `cells` that were lit.
        lit: Vec<usize>,
        /// For unit checks: whether the observation matched the expectation.
        ok: Option<bool>,
    },
}

impl Detail {
    pub fn is_press(&self) -> bool {
        matches!(self, Detail::Press { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogEntry {
    #[serde(with = "fixed6")]
    pub time: f64,
    /// Index of the scenario step that produced the entry.
    pub step: usize,
    pub op_class: OpClass,
    pub detail: Detail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassTotals {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "U")]
    pub u: usize,
    #[serde(rename = "O")]
    pub o: usize,
    #[serde(rename = "L")]
    pub l: usize,
}

impl ClassTotals {
    pub fn from_entries(entries: &[LogEntry]) -> Self {
        let mut t = Self::default();
        for e in entries {
            *t.get_mut(e.op_class) += 1;
        }
        t
    }

    pub fn get(&self, class: OpClass) -> usize {
        match class {
            OpClass::K => self.k,
            OpClass::U => self.u,
            OpClass::O => self.o,
            OpClass::L => self.l,
        }
    }

    fn get_mut(&mut self, class: OpClass) -> &mut usize {
        match class {
            OpClass::K => &mut self.k,
            OpClass::U => &mut self.u,
            OpClass::O => &mut self.o,
            OpClass::L => &mut self.l,
        }
    }

    pub fn total(&self) -> usize {
        self.k + self.u + self.o + self.l
    }
}

/// Timestamped, classified record of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionLog {
    pub entries: Vec<LogEntry>,
    pub totals: ClassTotals,
    /// Clock time elapsed, idle waits included.
    #[serde(with = "fixed6")]
    pub total_time: f64,
    /// Time spent pressing, checking and deciding.
    #[serde(with = "fixed6")]
    pub busy_time: f64,
    pub program_events: Vec<ProgramEvent>,
    pub final_plant: PlantState,
}

impl SessionLog {
    pub fn presses(&self) -> usize {
        self.entries.iter().filter(|e| e.detail.is_press()).count()
    }

    pub fn checks(&self) -> usize {
        self.entries.len() - self.presses()
    }

    /// Presses plus visual checks.
    pub fn load(&self) -> usize {
        self.entries.len()
    }

    /// Checks the log's own invariants: non-decreasing times and totals that
    /// match the entries.
    pub fn is_consistent(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].time <= w[1].time)
            && self.totals == ClassTotals::from_entries(&self.entries)
    }
}
