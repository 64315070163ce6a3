//! Wire types shared by the HTTP and stream endpoints.

use cscp_core::io::canonical::fixed6;
use cscp_core::io::canonical_digest;
use cscp_core::operator::Step;
use cscp_core::panel::{
    Cell, ChangeEvent, CommandEmission, EntryKey, PanelSpec, PanelState, PlantState, PressOutcome, ProgramEvent, Pulse,
    Switch, UnitRef,
};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

/// Selector, keypad and latch state of a panel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionView {
    pub selected_system: Option<usize>,
    pub selected_screen: Option<usize>,
    pub selected_unit: Option<UnitRef>,
    pub digits: Vec<u8>,
    pub guard_open: bool,
    pub lamp_test_held: bool,
    pub pending_sequential: Vec<Pulse>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramView {
    pub id: usize,
    pub active: bool,
    #[serde(with = "fixed6::option")]
    pub start_time: Option<f64>,
    pub confirmed: Vec<bool>,
}

/// An overdue program entry the operator must issue by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prompt {
    pub program: usize,
    pub entry: usize,
    pub target: UnitRef,
    pub desired: Switch,
    #[serde(with = "fixed6")]
    pub deadline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecklistView {
    pub scenario_id: String,
    /// Index of the active step; equals `total` once complete.
    pub index: usize,
    pub total: usize,
    pub current: Option<Step>,
}

/// Everything a client can observe about one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelView {
    #[serde(with = "fixed6")]
    pub clock: f64,
    pub cells: Vec<Cell>,
    pub selection: SelectionView,
    pub unacked: Vec<UnitRef>,
    pub overdue: Vec<EntryKey>,
    /// Unit states, by system.
    pub units: Vec<Vec<Switch>>,
    pub programs: Vec<ProgramView>,
    pub prompts: Vec<Prompt>,
    pub checklist: Option<ChecklistView>,
}

impl PanelView {
    pub fn build(plant: &PlantState, panel: &PanelState, checklist: Option<ChecklistView>) -> Self {
        let prompts = panel
            .overdue_entries
            .iter()
            .filter_map(|&(pid, e)| {
                let p = plant.program(pid)?;
                let entry = p.entries.get(e)?;
                Some(Prompt {
                    program: pid,
                    entry: e,
                    target: entry.target,
                    desired: entry.desired,
                    deadline: p.deadline_time(e)?,
                })
            })
            .collect();
        Self {
            clock: plant.clock,
            cells: panel.indicator_frame.cells.clone(),
            selection: SelectionView {
                selected_system: panel.selected_system,
                selected_screen: panel.selected_screen,
                selected_unit: panel.selected_unit,
                digits: panel.digits.clone(),
                guard_open: panel.guard_open,
                lamp_test_held: panel.lamp_test_held,
                pending_sequential: panel.pending_sequential.clone(),
            },
            unacked: panel.unacked_changes.iter().copied().collect(),
            overdue: panel.overdue_entries.iter().copied().collect(),
            units: plant
                .systems
                .iter()
                .map(|s| s.units.iter().map(|u| u.state).collect())
                .collect(),
            programs: plant
                .programs
                .iter()
                .map(|p| ProgramView {
                    id: p.id,
                    active: p.active,
                    start_time: p.start_time,
                    confirmed: p.progress.iter().map(|e| e.confirmed_at.is_some()).collect(),
                })
                .collect(),
            prompts,
            checklist,
        }
    }

    pub fn digest(&self) -> String {
        canonical_digest(self)
    }
}

/// Full state sent on session creation, on request and on stream connect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub session_id: Uuid,
    pub plant_id: String,
    pub spec: PanelSpec,
    /// Number of state transitions applied so far.
    pub version: u64,
    #[serde(with = "fixed6")]
    pub tick_rate: f64,
    pub view: PanelView,
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellChange {
    pub index: usize,
    pub cell: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitChange {
    pub unit: UnitRef,
    pub state: Switch,
}

/// What one transition changed, plus what caused it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Delta {
    pub version: u64,
    #[serde(with = "fixed6")]
    pub clock: f64,
    pub frame_len: usize,
    pub cells: Vec<CellChange>,
    pub selection: Option<SelectionView>,
    pub unacked: Option<Vec<UnitRef>>,
    pub overdue: Option<Vec<EntryKey>>,
    pub units: Vec<UnitChange>,
    pub programs: Vec<ProgramView>,
    pub prompts: Option<Vec<Prompt>>,
    pub checklist: Option<ChecklistView>,
    /// Set when this session's own button event caused the transition.
    pub outcome: Option<PressOutcome>,
    pub emissions: Vec<CommandEmission>,
    pub changes: Vec<ChangeEvent>,
    pub program_events: Vec<ProgramEvent>,
    /// Digest of the view after the transition.
    pub digest: String,
}

fn changed<T: PartialEq + Clone>(a: &T, b: &T) -> Option<T> {
    if a != b {
        Some(b.clone())
    } else {
        None
    }
}

impl Delta {
    /// Difference between two views; cause fields are left empty.
    pub fn between(version: u64, old: &PanelView, new: &PanelView) -> Self {
        let cells = new
            .cells
            .iter()
            .enumerate()
            .filter(|(i, c)| old.cells.get(*i) != Some(*c))
            .map(|(index, cell)| CellChange {
                index,
                cell: cell.clone(),
            })
            .collect();
        let units = new
            .units
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().enumerate().map(move |(u, st)| (UnitRef::new(s, u), *st)))
            .filter(|(u, st)| old.units.get(u.system).and_then(|r| r.get(u.unit)) != Some(st))
            .map(|(unit, state)| UnitChange { unit, state })
            .collect();
        let programs = new
            .programs
            .iter()
            .filter(|p| !old.programs.contains(p))
            .cloned()
            .collect();
        Self {
            version,
            clock: new.clock,
            frame_len: new.cells.len(),
            cells,
            selection: changed(&old.selection, &new.selection),
            unacked: changed(&old.unacked, &new.unacked),
            overdue: changed(&old.overdue, &new.overdue),
            units,
            programs,
            prompts: changed(&old.prompts, &new.prompts),
            checklist: if old.checklist != new.checklist {
                new.checklist.clone()
            } else {
                None
            },
            outcome: None,
            emissions: Vec::new(),
            changes: Vec::new(),
            program_events: Vec::new(),
            digest: new.digest(),
        }
    }

    /// True when nothing but the clock moved.
    pub fn clock_only(&self) -> bool {
        self.cells.is_empty()
            && self.selection.is_none()
            && self.unacked.is_none()
            && self.overdue.is_none()
            && self.units.is_empty()
            && self.programs.is_empty()
            && self.prompts.is_none()
            && self.checklist.is_none()
    }
}

/// Applies a delta to a client-side copy of the view.
pub fn apply_delta(view: &mut PanelView, delta: &Delta) {
    view.clock = delta.clock;
    view.cells.resize(
        delta.frame_len,
        Cell {
            lit: false,
            blinking: false,
            label: String::new(),
            binding: cscp_core::panel::Binding::Unbound,
        },
    );
    for c in &delta.cells {
        view.cells[c.index] = c.cell.clone();
    }
    if let Some(s) = &delta.selection {
        view.selection = s.clone();
    }
    if let Some(u) = &delta.unacked {
        view.unacked = u.clone();
    }
    if let Some(o) = &delta.overdue {
        view.overdue = o.clone();
    }
    for u in &delta.units {
        if let Some(st) = view.units.get_mut(u.unit.system).and_then(|r| r.get_mut(u.unit.unit)) {
            *st = u.state;
        }
    }
    for p in &delta.programs {
        if let Some(slot) = view.programs.iter_mut().find(|q| q.id == p.id) {
            *slot = p.clone();
        }
    }
    if let Some(p) = &delta.prompts {
        view.prompts = p.clone();
    }
    if let Some(c) = &delta.checklist {
        view.checklist = Some(c.clone());
    }
}

/// One stream message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum Message {
    Snapshot(Box<Snapshot>),
    Delta(Box<Delta>),
    Prompt(Prompt),
    Error(ErrorBody),
}

/// Message envelope; `seq` counts messages on one connection, from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub seq: u64,
    #[serde(flatten)]
    pub message: Message,
}

/// Messages a client may send on the stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Event(cscp_core::panel::ButtonEvent),
    Snapshot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorBody {
    pub error: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub spec_id: String,
    pub plant_id: String,
    #[serde(default)]
    pub scenario_id: Option<String>,
    /// Sessions naming the same key share one plant.
    #[serde(default)]
    pub shared_plant: Option<String>,
    /// Program entries that fail to auto-issue, on top of the scenario's.
    #[serde(default)]
    pub faults: Vec<EntryKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Created {
    pub session_id: Uuid,
    pub snapshot: Snapshot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TickRequest {
    #[serde(with = "fixed6")]
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteCommand {
    pub unit: UnitRef,
    pub desired: Switch,
}

/// One append-only session log record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LogRecord {
    Press {
        version: u64,
        event: cscp_core::panel::ButtonEvent,
        outcome: PressOutcome,
        emissions: Vec<CommandEmission>,
        changes: Vec<ChangeEvent>,
    },
    Tick {
        version: u64,
        #[serde(with = "fixed6")]
        dt: f64,
        events: Vec<ProgramEvent>,
    },
    Remote {
        version: u64,
        emission: CommandEmission,
        change: Option<ChangeEvent>,
    },
    /// A transition made by another session on the shared plant.
    Peer { version: u64, changes: Vec<ChangeEvent> },
}
