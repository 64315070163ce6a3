use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::panel::{Layout, PlantState, UnitRef};

/// A control task: the units it involves and the row it is operated from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Function {
    pub id: String,
    pub units: Vec<UnitRef>,
    pub control_row: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Subject {
    System { system: usize, name: String },
    Function { function: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRef {
    pub row: String,
    pub unit: UnitRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Violation {
    pub subject: Subject,
    pub description: String,
    pub cells: Vec<CellRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LintReport {
    pub violations: Vec<Violation>,
}

impl LintReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LintError {
    #[error("layout row {row} references unknown unit {unit}")]
    UnknownUnit { row: String, unit: UnitRef },
    #[error("unit {0} is not displayed in any row")]
    Uncovered(UnitRef),
    #[error("function {function} references unknown unit {unit}")]
    UnknownFunctionUnit { function: String, unit: UnitRef },
    #[error("function {function} is controlled from unknown row {row}")]
    UnknownRow { function: String, row: String },
    #[error("duplicate row id {0}")]
    DuplicateRow(String),
}

/// Checks that every system is displayed within one row and that each unit
/// of a function is displayed in the row the function is controlled from.
pub fn lint_autonomy(plant: &PlantState, layout: &Layout, functions: &[Function]) -> Result<LintReport, LintError> {
    let mut rows: BTreeMap<&str, BTreeSet<UnitRef>> = BTreeMap::new();
    for row in &layout.rows {
        if rows.contains_key(row.id.as_str()) {
            return Err(LintError::DuplicateRow(row.id.clone()));
        }
        if let Some(&unit) = row.units.iter().find(|u| !plant.contains(**u)) {
            return Err(LintError::UnknownUnit {
                row: row.id.clone(),
                unit,
            });
        }
        rows.insert(&row.id, row.units.iter().copied().collect());
    }
    if let Some(u) = plant.units().find(|u| !rows.values().any(|r| r.contains(u))) {
        return Err(LintError::Uncovered(u));
    }
    let mut sharing: BTreeMap<UnitRef, Vec<&str>> = BTreeMap::new();
    for f in functions {
        if let Some(&unit) = f.units.iter().find(|u| !plant.contains(**u)) {
            return Err(LintError::UnknownFunctionUnit {
                function: f.id.clone(),
                unit,
            });
        }
        if !rows.contains_key(f.control_row.as_str()) {
            return Err(LintError::UnknownRow {
                function: f.id.clone(),
                row: f.control_row.clone(),
            });
        }
        for &u in &f.units {
            sharing.entry(u).or_default().push(&f.id);
        }
    }

    let mut violations = Vec::new();
    for (s, sys) in plant.systems.iter().enumerate() {
        let units: Vec<UnitRef> = (0..sys.units.len()).map(|u| UnitRef::new(s, u)).collect();
        if units.is_empty() || rows.values().any(|r| units.iter().all(|u| r.contains(u))) {
            continue;
        }
        let cells = layout
            .rows
            .iter()
            .flat_map(|row| {
                row.units
                    .iter()
                    .filter(|u| u.system == s)
                    .map(|&unit| CellRef {
                        row: row.id.clone(),
                        unit,
                    })
            })
            .collect();
        let spanned: BTreeSet<&str> = layout
            .rows
            .iter()
            .filter(|r| r.units.iter().any(|u| u.system == s))
            .map(|r| r.id.as_str())
            .collect();
        violations.push(Violation {
            subject: Subject::System {
                system: s,
                name: sys.name.clone(),
            },
            description: format!(
                "system {} is split across rows {}",
                sys.name,
                spanned.into_iter().collect::<Vec<_>>().join(", ")
            ),
            cells,
        });
    }
    for f in functions {
        let row = &rows[f.control_row.as_str()];
        for &u in &f.units {
            if row.contains(&u) {
                continue;
            }
            let users = &sharing[&u];
            let description = if users.len() > 1 {
                format!(
                    "unit {u} is shared by {} but not duplicated in row {}, from which {} is controlled",
                    users.join(", "),
                    f.control_row,
                    f.id
                )
            } else {
                format!("unit {u} of {} is not displayed in its control row {}", f.id, f.control_row)
            };
            violations.push(Violation {
                subject: Subject::Function {
                    function: f.id.clone(),
                },
                description,
                cells: vec![CellRef {
                    row: f.control_row.clone(),
                    unit: u,
                }],
            });
        }
    }
    Ok(LintReport { violations })
}
