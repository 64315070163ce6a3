use serde::{Deserialize, Serialize};

use super::error::{PanelError, SequentialError};
use super::plant::{plant_apply, PlantState};
use super::program::reconcile;
use super::render::ack_change;
use super::sequential::{decode_sequential, CommandCatalog};
use super::spec::{Family, Geometry};
use super::state::{ButtonEvent, ButtonKind, PanelState};
use super::types::{ChangeEvent, CommandEmission, CommandSource, Switch, UnitRef};

/// How the panel responded to one button event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressOutcome {
    Accepted,
    /// Command pressed before any system, program or unit was selected.
    NoSelection,
    /// Guarded command pressed with the guard latch closed.
    GuardClosed,
    /// Pulse accepted, code not yet complete.
    SequenceIncomplete,
    /// Completed pulse train did not decode to a catalog command.
    InvalidCode,
    /// Position valid for the geometry but wired to no unit of this plant.
    Unbound,
    /// Event had no effect (acknowledging a cell with no pending change).
    NoOp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressResult {
    pub state: PanelState,
    pub emissions: Vec<CommandEmission>,
    pub outcome: PressOutcome,
    /// Program to start because its selector was latched on a program panel.
    pub program_start: Option<usize>,
}

impl PressResult {
    fn new(state: PanelState, outcome: PressOutcome) -> Self {
        Self {
            state,
            emissions: Vec::new(),
            outcome,
            program_start: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> PanelError {
    PanelError::InvalidEvent(msg.into())
}

/// Applies one button event to the panel. Emissions are returned, not
/// applied; see [`operate`] for the combined transition.
pub fn press_button(
    state: &PanelState,
    plant: &PlantState,
    ev: &ButtonEvent,
) -> Result<PressResult, PanelError> {
    let mut next = state.clone();
    let mut result = match ev.kind {
        ButtonKind::SelectSystem { index } => select(next, plant, index)?,
        ButtonKind::Command { index, switch } => command(next, plant, index, switch)?,
        ButtonKind::Digit { digit } => match state.spec.family {
            Family::Hierarchical => hierarchy_digit(next, plant, digit)?,
            Family::AddressPanel => address_digit(next, plant, digit)?,
            f => return Err(invalid(format!("{f} panel has no keypad"))),
        },
        ButtonKind::LampTest { pressed } => {
            next.lamp_test_held = pressed;
            PressResult::new(next, PressOutcome::Accepted)
        }
        ButtonKind::Ack { cell } => {
            if cell >= state.indicator_frame.len() {
                return Err(invalid(format!("cell {cell} out of range")));
            }
            let (acked, pending) = ack_change(&next, cell);
            let outcome = if pending {
                PressOutcome::Accepted
            } else {
                PressOutcome::NoOp
            };
            PressResult::new(acked, outcome)
        }
        ButtonKind::GuardToggle => {
            next.guard_open = !next.guard_open;
            PressResult::new(next, PressOutcome::Accepted)
        }
        ButtonKind::Pulse | ButtonKind::Gap => {
            if state.spec.family != Family::SingleChannel {
                return Err(invalid("pulse keying only exists on single-channel panels"));
            }
            next.pending_sequential.push(match ev.kind {
                ButtonKind::Pulse => super::sequential::Pulse::Pulse,
                _ => super::sequential::Pulse::Gap,
            });
            sequential(next, plant)
        }
    };
    result.state.refresh(plant);
    Ok(result)
}

fn select(mut next: PanelState, plant: &PlantState, index: usize) -> Result<PressResult, PanelError> {
    let (s, _) = match next.spec.matrix() {
        Some(m) if next.spec.family.has_selectors() => m,
        _ => return Err(invalid(format!("{} panel has no selectors", next.spec.family))),
    };
    if index >= s {
        return Err(invalid(format!("selector {index} out of range 0..{s}")));
    }
    next.selected_system = Some(index);
    let mut program_start = None;
    if next.spec.family == Family::ProgramPanel {
        if let Some(p) = plant.programs.get(index) {
            if p.start_time.is_none() {
                program_start = Some(p.id);
            }
        }
    }
    let mut r = PressResult::new(next, PressOutcome::Accepted);
    r.program_start = program_start;
    Ok(r)
}

fn emit(next: PanelState, plant: &PlantState, target: UnitRef, desired: Switch) -> PressResult {
    if !plant.contains(target) {
        return PressResult::new(next, PressOutcome::Unbound);
    }
    if next.spec.safety_guarded.contains(&target) && !next.guard_open {
        return PressResult::new(next, PressOutcome::GuardClosed);
    }
    let mut r = PressResult::new(next, PressOutcome::Accepted);
    r.emissions.push(CommandEmission::operator(target, desired));
    r
}

fn command(
    next: PanelState,
    plant: &PlantState,
    index: usize,
    switch: Switch,
) -> Result<PressResult, PanelError> {
    let spec = &next.spec;
    match (&spec.family, &spec.geometry) {
        (Family::SingleChannel, _) => Err(invalid("single-channel commands are keyed as pulses")),
        (Family::MultiChannel, Geometry::Channels { count }) => {
            if index >= *count {
                return Err(invalid(format!("channel {index} out of range 0..{count}")));
            }
            match plant.unit_at(index) {
                Some(u) => Ok(emit(next, plant, u, switch)),
                None => Ok(PressResult::new(next, PressOutcome::Unbound)),
            }
        }
        (Family::ProgramPanel, Geometry::Matrix { command_buttons, .. }) => {
            if index >= *command_buttons {
                return Err(invalid(format!("entry button {index} out of range 0..{command_buttons}")));
            }
            let Some(sel) = next.selected_system else {
                return Ok(PressResult::new(next, PressOutcome::NoSelection));
            };
            // An entry button issues that entry's scheduled command; the
            // switch field carries no information here.
            match plant.programs.get(sel).and_then(|p| p.entries.get(index)) {
                Some(e) => {
                    let (t, d) = (e.target, e.desired);
                    Ok(emit(next, plant, t, d))
                }
                None => Ok(PressResult::new(next, PressOutcome::Unbound)),
            }
        }
        (_, Geometry::Matrix { .. }) => {
            let pairs = spec.command_pairs();
            if index >= pairs {
                return Err(invalid(format!("command position {index} out of range 0..{pairs}")));
            }
            match next.selected_system {
                Some(sys) => Ok(emit(next, plant, UnitRef::new(sys, index), switch)),
                None => Ok(PressResult::new(next, PressOutcome::NoSelection)),
            }
        }
        (Family::Hierarchical | Family::AddressPanel, _) => {
            if index != 0 {
                return Err(invalid("keypad panels have a single on/off pair (index 0)"));
            }
            let target = match next.selected_unit {
                Some(u) => Some(u),
                None if spec.branching().is_empty() && spec.family == Family::Hierarchical => {
                    plant.unit_at(0)
                }
                None => None,
            };
            match target {
                Some(u) => Ok(emit(next, plant, u, switch)),
                None => Ok(PressResult::new(next, PressOutcome::NoSelection)),
            }
        }
        _ => Err(invalid("geometry does not match family")),
    }
}

fn hierarchy_digit(mut next: PanelState, plant: &PlantState, digit: u8) -> Result<PressResult, PanelError> {
    let branching = next.spec.branching().to_vec();
    if branching.is_empty() {
        return Err(invalid("single-unit hierarchy takes no digits"));
    }
    if next.digits.len() >= branching.len() {
        next.digits.clear();
    }
    let stage = next.digits.len();
    let b = branching[stage];
    if digit == 0 || usize::from(digit) > b {
        return Err(invalid(format!("digit {digit} out of range 1..={b} at stage {}", stage + 1)));
    }
    if stage == 0 {
        next.selected_unit = None;
    }
    next.digits.push(digit);
    if next.digits.len() < branching.len() {
        return Ok(PressResult::new(next, PressOutcome::Accepted));
    }
    let flat = next
        .digits
        .iter()
        .zip(&branching)
        .fold(0usize, |acc, (&d, &b)| acc * b + usize::from(d) - 1);
    match plant.unit_at(flat) {
        Some(u) => {
            next.selected_unit = Some(u);
            Ok(PressResult::new(next, PressOutcome::Accepted))
        }
        None => Ok(PressResult::new(next, PressOutcome::Unbound)),
    }
}

fn address_digit(mut next: PanelState, plant: &PlantState, digit: u8) -> Result<PressResult, PanelError> {
    let Geometry::Screens {
        rows,
        cols,
        screens,
        keypad,
    } = next.spec.geometry
    else {
        return Err(invalid("geometry does not match family"));
    };
    if digit == 0 || usize::from(digit) > keypad {
        return Err(invalid(format!("digit {digit} out of range 1..={keypad}")));
    }
    let sd = next.spec.screen_digits();
    let cd = next.spec.cell_digits();
    let pos = next.digits.len();
    let d = usize::from(digit) - 1;
    if pos >= sd {
        let limit = match (cd, pos - sd) {
            (1, _) => rows * cols,
            (_, 0) => rows,
            _ => cols,
        };
        if d >= limit {
            return Err(invalid(format!("digit {digit} out of range 1..={limit} for cell entry")));
        }
    }
    if pos == 0 {
        next.selected_unit = None;
    }
    next.digits.push(digit);
    if next.digits.len() == sd {
        let screen = next
            .digits
            .iter()
            .fold(0usize, |acc, &x| acc * keypad + usize::from(x) - 1);
        if screen >= screens {
            next.digits.clear();
            return Ok(PressResult::new(next, PressOutcome::Unbound));
        }
        next.selected_screen = Some(screen);
    }
    if next.digits.len() < sd + cd {
        return Ok(PressResult::new(next, PressOutcome::Accepted));
    }
    let cell_digits: Vec<usize> = next.digits[sd..].iter().map(|&x| usize::from(x) - 1).collect();
    let cell = match cell_digits.as_slice() {
        [c] => *c,
        [r, c] => r * cols + c,
        _ => unreachable!("cell entry is one or two digits"),
    };
    next.digits.clear();
    let screen = next.selected_screen.unwrap_or(0);
    match plant.unit_at(screen * rows * cols + cell) {
        Some(u) => {
            next.selected_unit = Some(u);
            Ok(PressResult::new(next, PressOutcome::Accepted))
        }
        None => Ok(PressResult::new(next, PressOutcome::Unbound)),
    }
}

fn sequential(mut next: PanelState, plant: &PlantState) -> PressResult {
    let catalog = CommandCatalog::from_plant(plant);
    match decode_sequential(&next.pending_sequential, &catalog) {
        Err(SequentialError::Incomplete) => PressResult::new(next, PressOutcome::SequenceIncomplete),
        Err(_) => {
            next.pending_sequential.clear();
            PressResult::new(next, PressOutcome::InvalidCode)
        }
        Ok(cmd) => {
            next.pending_sequential.clear();
            let r = emit(next, plant, cmd.target, cmd.desired);
            let mut r = r;
            if r.outcome == PressOutcome::Accepted {
                r.state.last_sequential = Some(cmd);
            }
            r
        }
    }
}

/// Records a plant change on the panel. Changes the operator did not cause
/// are flagged for acknowledgment when the panel signals status changes.
pub fn note_change(panel: &mut PanelState, change: &ChangeEvent) {
    if change.source != CommandSource::Operator && panel.spec.change_signaling_capable {
        panel.unacked_changes.insert(change.target);
    }
}

/// Applies emissions to the plant in order and updates the panel.
pub fn apply_emissions(
    plant: &PlantState,
    panel: &PanelState,
    emissions: &[CommandEmission],
) -> Result<(PlantState, PanelState, Vec<ChangeEvent>), PanelError> {
    let mut plant = plant.clone();
    let mut panel = panel.clone();
    let mut changes = Vec::new();
    for e in emissions {
        let (next, change) = plant_apply(&plant, e)?;
        plant = next;
        if let Some(c) = change {
            note_change(&mut panel, &c);
            changes.push(c);
        }
    }
    panel.refresh(&plant);
    Ok((plant, panel, changes))
}

/// Result of one full button transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub plant: PlantState,
    pub panel: PanelState,
    pub outcome: PressOutcome,
    pub emissions: Vec<CommandEmission>,
    pub changes: Vec<ChangeEvent>,
    pub program_start: Option<usize>,
}

/// Press, start any selected program, apply emissions and reconcile program
/// progress, without advancing the clock.
pub fn operate(plant: &PlantState, panel: &PanelState, ev: &ButtonEvent) -> Result<Operation, PanelError> {
    let r = press_button(panel, plant, ev)?;
    let plant = match r.program_start {
        Some(id) => super::plant::start_program(plant, id)?,
        None => plant.clone(),
    };
    let (plant, panel, changes) = apply_emissions(&plant, &r.state, &r.emissions)?;
    let (plant, panel, _) = reconcile(&plant, &panel);
    Ok(Operation {
        plant,
        panel,
        outcome: r.outcome,
        emissions: r.emissions,
        changes,
        program_start: r.program_start,
    })
}
