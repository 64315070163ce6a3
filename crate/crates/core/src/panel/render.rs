use std::collections::BTreeMap;

use super::error::PanelError;
use super::plant::PlantState;
use super::spec::{Family, Geometry};
use super::state::{Binding, Cell, IndicatorFrame, PanelState};
use super::types::{Switch, UnitRef};

/// Nominal state per unit for dark-screen rendering. Units absent from the
/// map never count as deviating.
pub type ExpectedStates = BTreeMap<UnitRef, Switch>;

/// Cell wiring and labels for the current selection.
pub fn bindings(state: &PanelState, plant: &PlantState) -> Vec<(Binding, String)> {
    let spec = &state.spec;
    let unit_cell = |u: UnitRef| match plant.unit(u) {
        Some(unit) => (Binding::Unit { unit: u }, unit.name.clone()),
        None => (Binding::Unbound, String::new()),
    };
    let flat_cell = |i: usize| match plant.unit_at(i) {
        Some(u) => unit_cell(u),
        None => (Binding::Unbound, String::new()),
    };
    match (&spec.family, &spec.geometry) {
        (_, Geometry::Single) => vec![(Binding::Confirmation, "CONFIRM".to_string())],
        (_, Geometry::Channels { count }) => (0..*count).map(flat_cell).collect(),
        (Family::MatrixExpanded, Geometry::Matrix { select_buttons, .. }) => {
            let pairs = spec.command_pairs();
            (0..*select_buttons)
                .flat_map(|s| (0..pairs).map(move |u| UnitRef::new(s, u)))
                .map(unit_cell)
                .collect()
        }
        (Family::ProgramPanel, Geometry::Matrix { select_buttons, command_buttons }) => {
            let mut cells: Vec<(Binding, String)> = (0..*select_buttons)
                .map(|i| match plant.programs.get(i) {
                    Some(p) => (Binding::Program { program: p.id }, p.name.clone()),
                    None => (Binding::Unbound, String::new()),
                })
                .collect();
            let selected = state.selected_system.and_then(|i| plant.programs.get(i));
            cells.extend((0..*command_buttons).map(|e| match selected {
                Some(p) if e < p.entries.len() => {
                    (Binding::Entry { program: p.id, entry: e }, (e + 1).to_string())
                }
                _ => (Binding::Unbound, String::new()),
            }));
            cells
        }
        (_, Geometry::Matrix { .. }) => {
            let pairs = spec.command_pairs();
            match state.selected_system {
                Some(sys) => (0..pairs).map(|u| unit_cell(UnitRef::new(sys, u))).collect(),
                None => vec![(Binding::Unbound, String::new()); pairs],
            }
        }
        (_, Geometry::Stages { branching }) => {
            (0..branching.iter().product::<usize>()).map(flat_cell).collect()
        }
        (_, Geometry::Screens { rows, cols, .. }) => {
            let per = rows * cols;
            match state.selected_screen {
                Some(screen) => (0..per).map(|c| flat_cell(screen * per + c)).collect(),
                None => vec![(Binding::Unbound, String::new()); per],
            }
        }
    }
}

fn normal_lit(state: &PanelState, plant: &PlantState, binding: Binding) -> bool {
    match binding {
        Binding::Unbound => false,
        Binding::Unit { unit } => plant.state(unit).is_some_and(Switch::is_on),
        Binding::Program { program } => plant
            .program(program)
            .is_some_and(|p| p.active && !p.completed()),
        Binding::Entry { program, entry } => plant
            .program(program)
            .and_then(|p| p.progress.get(entry))
            .is_some_and(|e| e.confirmed_at.is_some()),
        Binding::Confirmation => state
            .last_sequential
            .is_some_and(|c| plant.state(c.target) == Some(c.desired)),
    }
}

fn frame(state: &PanelState, plant: &PlantState, expected: Option<&ExpectedStates>) -> IndicatorFrame {
    let cells = bindings(state, plant)
        .into_iter()
        .map(|(binding, label)| {
            if state.lamp_test_held {
                return Cell {
                    lit: true,
                    blinking: false,
                    label,
                    binding,
                };
            }
            let unacked = matches!(binding, Binding::Unit { unit } if state.unacked_changes.contains(&unit));
            let lit = match (expected, binding) {
                (Some(exp), Binding::Unit { unit }) => {
                    let deviates = match (exp.get(&unit), plant.state(unit)) {
                        (Some(want), Some(have)) => *want != have,
                        _ => false,
                    };
                    deviates || unacked
                }
                _ => normal_lit(state, plant, binding) || unacked,
            };
            Cell {
                lit,
                blinking: unacked,
                label,
                binding,
            }
        })
        .collect();
    IndicatorFrame { cells }
}

pub(crate) fn normal_frame(state: &PanelState, plant: &PlantState) -> IndicatorFrame {
    frame(state, plant, None)
}

/// Renders the frame. Passing `expected` selects dark-screen mode: a unit
/// cell is lit only when the unit deviates from its nominal state or carries
/// an unacknowledged change.
pub fn render_indicators(
    state: &PanelState,
    plant: &PlantState,
    expected: Option<&ExpectedStates>,
) -> Result<IndicatorFrame, PanelError> {
    if expected.is_some() && !state.spec.dark_screen_capable {
        return Err(PanelError::Configuration(format!(
            "panel {} is not dark-screen capable",
            state.spec.id
        )));
    }
    Ok(frame(state, plant, expected))
}

/// Removes a cell's pending change. Returns the new state and whether the
/// cell actually carried an unacknowledged change.
pub fn ack_change(state: &PanelState, cell: usize) -> (PanelState, bool) {
    let mut next = state.clone();
    let unit = match state.indicator_frame.cells.get(cell).map(|c| c.binding) {
        Some(Binding::Unit { unit }) => unit,
        _ => return (next, false),
    };
    let was_pending = next.unacked_changes.remove(&unit);
    if was_pending {
        if let Some(c) = next.indicator_frame.cells.get_mut(cell) {
            c.blinking = false;
        }
    }
    (next, was_pending)
}
