use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::plant::PlantState;
use super::render;
use super::sequential::Pulse;
use super::spec::{Family, PanelSpec};
use super::types::{CommandEmission, Switch, UnitRef};
use crate::io::canonical::fixed6;

/// What a frame cell is wired to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Binding {
    Unbound,
    Unit { unit: UnitRef },
    /// Program-running LED inside a program selector.
    Program { program: usize },
    /// Execution LED inside an entry command button.
    Entry { program: usize, entry: usize },
    /// The single-channel confirmation lamp.
    Confirmation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    pub lit: bool,
    pub blinking: bool,
    pub label: String,
    pub binding: Binding,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicatorFrame {
    pub cells: Vec<Cell>,
}

impl IndicatorFrame {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn lit_cells(&self) -> BTreeSet<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.lit)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn cell_of(&self, unit: UnitRef) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| c.binding == Binding::Unit { unit })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ButtonKind {
    SelectSystem { index: usize },
    Command { index: usize, switch: Switch },
    Digit { digit: u8 },
    LampTest { pressed: bool },
    Ack { cell: usize },
    GuardToggle,
    /// One press of the single-channel key.
    Pulse,
    /// Inter-group pause on the single-channel key.
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ButtonEvent {
    pub kind: ButtonKind,
    #[serde(with = "fixed6")]
    pub timestamp: f64,
}

impl ButtonEvent {
    pub fn new(kind: ButtonKind, timestamp: f64) -> Self {
        Self { kind, timestamp }
    }
}

/// Live runtime state of one panel instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelState {
    pub spec: PanelSpec,
    /// Latched system (or program) selector.
    pub selected_system: Option<usize>,
    /// Displayed screen on address panels.
    pub selected_screen: Option<usize>,
    /// Unit addressed by completed keypad entry (hierarchical/address).
    pub selected_unit: Option<UnitRef>,
    pub digits: Vec<u8>,
    pub guard_open: bool,
    pub lamp_test_held: bool,
    pub unacked_changes: BTreeSet<UnitRef>,
    pub overdue_entries: BTreeSet<(usize, usize)>,
    pub pending_sequential: Vec<Pulse>,
    pub last_sequential: Option<CommandEmission>,
    pub indicator_frame: IndicatorFrame,
}

impl PanelState {
    /// Power-on state: nothing selected, guard closed.
    pub fn power_on(spec: PanelSpec, plant: &PlantState) -> Self {
        let selected_screen = match spec.family {
            Family::AddressPanel if spec.screen_digits() == 0 => Some(0),
            _ => None,
        };
        let mut state = Self {
            spec,
            selected_system: None,
            selected_screen,
            selected_unit: None,
            digits: Vec::new(),
            guard_open: false,
            lamp_test_held: false,
            unacked_changes: BTreeSet::new(),
            overdue_entries: BTreeSet::new(),
            pending_sequential: Vec::new(),
            last_sequential: None,
            indicator_frame: IndicatorFrame::default(),
        };
        state.refresh(plant);
        state
    }

    /// Re-renders the normal-mode frame from the plant.
    pub fn refresh(&mut self, plant: &PlantState) {
        self.indicator_frame = render::normal_frame(self, plant);
    }

    /// Frame cells bound to currently unacknowledged changes.
    pub fn unacked_cells(&self) -> BTreeSet<usize> {
        self.indicator_frame
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c.binding, Binding::Unit { unit } if self.unacked_changes.contains(&unit)))
            .map(|(i, _)| i)
            .collect()
    }
}
