use serde::{Deserialize, Serialize};

use super::error::OperatorError;
use super::log::{ClassTotals, OpClass, SessionLog};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassShares {
    pub counts: ClassTotals,
    pub total: usize,
    /// Fraction of all entries per class, in K, U, O, L order. All zero for
    /// an empty log.
    pub shares: [f64; 4],
}

impl ClassShares {
    pub fn share(&self, class: OpClass) -> f64 {
        let i = OpClass::ALL.iter().position(|&c| c == class).expect("known class");
        self.shares[i]
    }
}

pub fn classify_ops(log: &SessionLog) -> ClassShares {
    let counts = ClassTotals::from_entries(&log.entries);
    let total = counts.total();
    let shares = OpClass::ALL.map(|c| {
        if total == 0 {
            0.0
        } else {
            counts.get(c) as f64 / total as f64
        }
    });
    ClassShares { counts, total, shares }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Presses,
    Checks,
    /// Presses plus checks.
    Load,
    /// Busy time: pressing, checking and deciding.
    Time,
}

impl Measure {
    fn name(self) -> &'static str {
        match self {
            Measure::Presses => "presses",
            Measure::Checks => "checks",
            Measure::Load => "load",
            Measure::Time => "time",
        }
    }

    pub fn of(self, log: &SessionLog) -> f64 {
        match self {
            Measure::Presses => log.presses() as f64,
            Measure::Checks => log.checks() as f64,
            Measure::Load => log.load() as f64,
            Measure::Time => log.busy_time,
        }
    }
}

pub fn workload_ratio(a: &SessionLog, b: &SessionLog, measure: Measure) -> Result<f64, OperatorError> {
    let denom = measure.of(b);
    if denom == 0.0 {
        return Err(OperatorError::UndefinedRatio(measure.name()));
    }
    Ok(measure.of(a) / denom)
}
