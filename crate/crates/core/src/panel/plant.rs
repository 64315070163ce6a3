use serde::{Deserialize, Serialize};

use super::error::PanelError;
use super::types::{ChangeEvent, CommandEmission, Switch, UnitRef};
use crate::io::canonical::fixed6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Unit {
    pub name: String,
    pub state: Switch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct System {
    /// ASCII identifier.
    pub name: String,
    pub display_name: String,
    pub units: Vec<Unit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramEntry {
    /// Seconds after program start at which the command auto-issues.
    #[serde(with = "fixed6")]
    pub issue_offset: f64,
    pub target: UnitRef,
    pub desired: Switch,
    /// Seconds after program start by which the command must be confirmed.
    #[serde(with = "fixed6")]
    pub deadline_offset: f64,
}

/// Runtime progress of one schedule entry.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryProgress {
    pub auto_issued: bool,
    #[serde(with = "fixed6::option")]
    pub confirmed_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramSchedule {
    pub id: usize,
    pub name: String,
    pub entries: Vec<ProgramEntry>,
    /// Clock time at which the onboard sequencer starts the program on its
    /// own; `None` means it only starts when selected on a program panel.
    #[serde(with = "fixed6::option")]
    pub scheduled_start: Option<f64>,
    pub active: bool,
    #[serde(with = "fixed6::option")]
    pub start_time: Option<f64>,
    pub progress: Vec<EntryProgress>,
}

impl ProgramSchedule {
    pub fn new(id: usize, name: impl Into<String>, entries: Vec<ProgramEntry>) -> Self {
        let progress = vec![EntryProgress::default(); entries.len()];
        Self {
            id,
            name: name.into(),
            entries,
            scheduled_start: None,
            active: false,
            start_time: None,
            progress,
        }
    }

    pub fn with_scheduled_start(mut self, at: f64) -> Self {
        self.scheduled_start = Some(at);
        self
    }

    /// Absolute due time of an entry, if the program has started.
    pub fn due_time(&self, entry: usize) -> Option<f64> {
        Some(self.start_time? + self.entries.get(entry)?.issue_offset)
    }

    pub fn deadline_time(&self, entry: usize) -> Option<f64> {
        Some(self.start_time? + self.entries.get(entry)?.deadline_offset)
    }

    pub fn completed(&self) -> bool {
        self.start_time.is_some() && self.progress.iter().all(|p| p.confirmed_at.is_some())
    }

    /// Entries sharing the issue offset of `entry`: one program step.
    pub fn step_of(&self, entry: usize) -> Vec<usize> {
        let Some(e) = self.entries.get(entry) else {
            return Vec::new();
        };
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, other)| other.issue_offset == e.issue_offset)
            .map(|(i, _)| i)
            .collect()
    }
}

/// The simulated set of controlled units, grouped by system, plus program
/// schedules and the simulation clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantState {
    pub id: String,
    pub display_name: String,
    pub systems: Vec<System>,
    pub programs: Vec<ProgramSchedule>,
    #[serde(with = "fixed6")]
    pub clock: f64,
}

impl PlantState {
    /// Uniform plant of `systems` systems with `units_per_system` units each,
    /// all off.
    pub fn uniform(id: &str, systems: usize, units_per_system: usize) -> Self {
        let systems = (0..systems)
            .map(|s| System {
                name: system_letter(s),
                display_name: format!("System {}", system_letter(s)),
                units: (0..units_per_system)
                    .map(|u| Unit {
                        name: format!("{}{}", system_letter(s), u + 1),
                        state: Switch::Off,
                    })
                    .collect(),
            })
            .collect();
        Self {
            id: id.to_string(),
            display_name: id.to_string(),
            systems,
            programs: Vec::new(),
            clock: 0.0,
        }
    }

    /// Plant with `n_units` units packed row-major into systems of at most
    /// `per_system` units.
    pub fn packed(id: &str, n_units: usize, per_system: usize) -> Self {
        let per_system = per_system.max(1);
        let systems = n_units.div_ceil(per_system);
        let mut plant = Self::uniform(id, systems, per_system);
        if let Some(last) = plant.systems.last_mut() {
            let rem = n_units - (systems - 1) * per_system;
            last.units.truncate(rem);
        }
        plant
    }

    pub fn unit_count(&self) -> usize {
        self.systems.iter().map(|s| s.units.len()).sum()
    }

    pub fn system_count(&self) -> usize {
        self.systems.len()
    }

    pub fn max_units_per_system(&self) -> usize {
        self.systems.iter().map(|s| s.units.len()).max().unwrap_or(0)
    }

    pub fn contains(&self, unit: UnitRef) -> bool {
        self.systems
            .get(unit.system)
            .is_some_and(|s| unit.unit < s.units.len())
    }

    pub fn state(&self, unit: UnitRef) -> Option<Switch> {
        Some(self.systems.get(unit.system)?.units.get(unit.unit)?.state)
    }

    pub fn unit(&self, unit: UnitRef) -> Option<&Unit> {
        self.systems.get(unit.system)?.units.get(unit.unit)
    }

    /// Catalog order index: systems in order, units in order.
    pub fn flat_index(&self, unit: UnitRef) -> Option<usize> {
        if !self.contains(unit) {
            return None;
        }
        let before: usize = self.systems[..unit.system].iter().map(|s| s.units.len()).sum();
        Some(before + unit.unit)
    }

    pub fn unit_at(&self, mut flat: usize) -> Option<UnitRef> {
        for (i, s) in self.systems.iter().enumerate() {
            if flat < s.units.len() {
                return Some(UnitRef::new(i, flat));
            }
            flat -= s.units.len();
        }
        None
    }

    pub fn units(&self) -> impl Iterator<Item = UnitRef> + '_ {
        self.systems
            .iter()
            .enumerate()
            .flat_map(|(s, sys)| (0..sys.units.len()).map(move |u| UnitRef::new(s, u)))
    }

    pub fn program(&self, id: usize) -> Option<&ProgramSchedule> {
        self.programs.iter().find(|p| p.id == id)
    }

    pub fn program_index(&self, id: usize) -> Option<usize> {
        self.programs.iter().position(|p| p.id == id)
    }

    /// Checks that every program target exists and that schedules are well
    /// formed.
    pub fn validate(&self) -> Result<(), PanelError> {
        for p in &self.programs {
            if p.progress.len() != p.entries.len() {
                return Err(PanelError::InvalidPlant(format!(
                    "program {} progress length {} != entry count {}",
                    p.id,
                    p.progress.len(),
                    p.entries.len()
                )));
            }
            for (i, e) in p.entries.iter().enumerate() {
                if !self.contains(e.target) {
                    return Err(PanelError::UnknownUnit(e.target));
                }
                if e.deadline_offset < e.issue_offset {
                    return Err(PanelError::InvalidPlant(format!(
                        "program {} entry {i}: deadline before issue time",
                        p.id
                    )));
                }
                if i > 0 && p.entries[i - 1].issue_offset > e.issue_offset {
                    return Err(PanelError::InvalidPlant(format!(
                        "program {} entries not sorted by issue time",
                        p.id
                    )));
                }
            }
        }
        let mut ids: Vec<usize> = self.programs.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.programs.len() {
            return Err(PanelError::InvalidPlant("duplicate program id".into()));
        }
        Ok(())
    }
}

/// Applies one command. Idempotent: commanding a unit into the state it
/// already holds changes nothing and yields no change event.
pub fn plant_apply(
    plant: &PlantState,
    emission: &CommandEmission,
) -> Result<(PlantState, Option<ChangeEvent>), PanelError> {
    let current = plant
        .state(emission.target)
        .ok_or(PanelError::UnknownUnit(emission.target))?;
    if current == emission.desired {
        return Ok((plant.clone(), None));
    }
    let mut next = plant.clone();
    next.systems[emission.target.system].units[emission.target.unit].state = emission.desired;
    Ok((
        next,
        Some(ChangeEvent {
            target: emission.target,
            from: current,
            to: emission.desired,
            source: emission.source,
        }),
    ))
}

/// Starts a program at the current clock. Starting an already started
/// program does nothing.
pub fn start_program(plant: &PlantState, program_id: usize) -> Result<PlantState, PanelError> {
    let idx = plant
        .program_index(program_id)
        .ok_or(PanelError::UnknownProgram(program_id))?;
    let mut next = plant.clone();
    let p = &mut next.programs[idx];
    if p.start_time.is_none() {
        p.start_time = Some(plant.clock);
        p.active = true;
    }
    Ok(next)
}

pub(crate) fn system_letter(index: usize) -> String {
    const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    let mut n = index;
    let mut out = Vec::new();
    loop {
        out.push(LETTERS[n % 26]);
        if n < 26 {
            break;
        }
        n = n / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::types::CommandSource;

    fn plant() -> PlantState {
        PlantState::uniform("t", 2, 12)
    }

    #[test]
    fn apply_turns_unit_on_with_change_event() {
        let p = plant();
        let (next, change) =
            plant_apply(&p, &CommandEmission::operator(UnitRef::new(0, 3), Switch::On)).unwrap();
        assert_eq!(next.state(UnitRef::new(0, 3)), Some(Switch::On));
        let change = change.unwrap();
        assert_eq!(change.from, Switch::Off);
        assert_eq!(change.to, Switch::On);
        assert_eq!(change.source, CommandSource::Operator);
    }

    #[test]
    fn apply_is_idempotent() {
        let p = plant();
        let cmd = CommandEmission::operator(UnitRef::new(0, 3), Switch::On);
        let (once, _) = plant_apply(&p, &cmd).unwrap();
        let (twice, change) = plant_apply(&once, &cmd).unwrap();
        assert_eq!(once, twice);
        assert!(change.is_none());
    }

    #[test]
    fn apply_rejects_unknown_unit() {
        let p = plant();
        let err = plant_apply(&p, &CommandEmission::operator(UnitRef::new(0, 99), Switch::On));
        assert_eq!(err.unwrap_err(), PanelError::UnknownUnit(UnitRef::new(0, 99)));
    }

    #[test]
    fn flat_index_round_trip() {
        let p = PlantState::packed("t", 27, 4);
        assert_eq!(p.unit_count(), 27);
        assert_eq!(p.systems.last().unwrap().units.len(), 3);
        for (i, u) in p.units().enumerate() {
            assert_eq!(p.flat_index(u), Some(i));
            assert_eq!(p.unit_at(i), Some(u));
        }
        assert_eq!(p.unit_at(27), None);
    }

    #[test]
    fn letters() {
        assert_eq!(system_letter(0), "A");
        assert_eq!(system_letter(25), "Z");
        assert_eq!(system_letter(26), "AA");
    }

    #[test]
    fn validate_rejects_unsorted_program() {
        let mut p = plant();
        let e = |t: f64| ProgramEntry {
            issue_offset: t,
            target: UnitRef::new(0, 0),
            desired: Switch::On,
            deadline_offset: t + 1.0,
        };
        p.programs.push(ProgramSchedule::new(0, "p", vec![e(5.0), e(1.0)]));
        assert!(p.validate().is_err());
        p.programs[0] = ProgramSchedule::new(0, "p", vec![e(1.0), e(5.0)]);
        assert!(p.validate().is_ok());
    }
}
