//! Authoritative session state. A hub owns one plant and every session
//! bound to it; all transitions on a hub run under its lock, in arrival
//! order.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Mutex, MutexGuard};

use cscp_core::operator::{Scenario, Step};
use cscp_core::panel::{
    note_change, operate, plant_apply, reconcile, step_program, Binding, ButtonEvent, ChangeEvent, CommandEmission,
    CommandSource, EntryKey, PanelError, PanelSpec, PanelState, PlantState, ProgramEvent, Switch, UnitRef,
};
use tokio::sync::broadcast;
use uuid::Uuid;

use crate::error::ServiceError;
use crate::protocol::{ChecklistView, Delta, LogRecord, PanelView, Prompt, Snapshot};

const CHANNEL_CAPACITY: usize = 1024;

/// What the hub pushes to stream subscribers of one session.
#[derive(Debug, Clone)]
pub enum Outbound {
    Delta(Box<Delta>),
    Prompt(Prompt),
    Closed(String),
}

/// Scenario steps worked through server-side as the operator acts.
#[derive(Debug, Clone)]
struct Checklist {
    scenario_id: String,
    steps: Vec<Step>,
    index: usize,
    since: f64,
    /// Units displayed since the active step began.
    seen: BTreeSet<UnitRef>,
}

impl Checklist {
    fn new(scenario: &Scenario, clock: f64) -> Self {
        Self {
            scenario_id: scenario.id.clone(),
            steps: scenario.steps.clone(),
            index: 0,
            since: clock,
            seen: BTreeSet::new(),
        }
    }

    fn view(&self) -> ChecklistView {
        ChecklistView {
            scenario_id: self.scenario_id.clone(),
            index: self.index,
            total: self.steps.len(),
            current: self.steps.get(self.index).copied(),
        }
    }

    fn satisfied(&self, step: &Step, plant: &PlantState) -> bool {
        match *step {
            Step::VerifyUnit { unit, expected } => plant.state(unit) == Some(expected) && self.seen.contains(&unit),
            Step::SetUnit { unit, desired } => plant.state(unit) == Some(desired),
            Step::AwaitProgramLabel { program, entry } => plant
                .program(program)
                .and_then(|p| p.progress.get(entry))
                .is_some_and(|e| e.confirmed_at.is_some()),
            Step::FullStatusSweep => plant.units().all(|u| self.seen.contains(&u)),
            Step::Wait { seconds } => plant.clock >= self.since + seconds - 1e-9,
        }
    }

    fn advance(&mut self, plant: &PlantState, panel: &PanelState) {
        while let Some(step) = self.steps.get(self.index).copied() {
            self.seen.extend(panel.indicator_frame.cells.iter().filter_map(|c| match c.binding {
                Binding::Unit { unit } => Some(unit),
                _ => None,
            }));
            if !self.satisfied(&step, plant) {
                break;
            }
            self.index += 1;
            self.since = plant.clock;
            self.seen.clear();
        }
    }
}

pub struct SessionState {
    pub id: Uuid,
    pub panel: PanelState,
    checklist: Option<Checklist>,
    pub log: Vec<LogRecord>,
    pub version: u64,
    view: PanelView,
    pub tx: broadcast::Sender<Outbound>,
    pub operator_connected: bool,
}

impl SessionState {
    fn next_version(&self) -> u64 {
        self.version + 1
    }
}

pub struct HubState {
    pub plant_id: String,
    pub plant: PlantState,
    pub faults: BTreeSet<EntryKey>,
    pub sessions: BTreeMap<Uuid, SessionState>,
}

/// Per-session cause details attached to a transition's delta.
#[derive(Default)]
struct Cause {
    origin: Option<Uuid>,
    outcome: Option<cscp_core::panel::PressOutcome>,
    emissions: Vec<CommandEmission>,
    changes: Vec<ChangeEvent>,
    program_events: Vec<ProgramEvent>,
}

/// Pre-transition copy used to undo a rejected event.
struct Saved {
    plant: PlantState,
    sessions: Vec<(Uuid, PanelState, usize)>,
}

pub struct Hub {
    pub tick_rate: f64,
    state: Mutex<HubState>,
}

impl Hub {
    pub fn new(plant_id: &str, plant: PlantState, tick_rate: f64) -> Self {
        Self {
            tick_rate,
            state: Mutex::new(HubState {
                plant_id: plant_id.to_string(),
                plant,
                faults: BTreeSet::new(),
                sessions: BTreeMap::new(),
            }),
        }
    }

    pub fn lock(&self) -> MutexGuard<'_, HubState> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }
}

fn invalid(e: PanelError) -> ServiceError {
    ServiceError::Invalid(e.to_string())
}

impl HubState {
    /// Binds a new panel to the plant and returns its snapshot.
    pub fn add_session(
        &mut self,
        spec: PanelSpec,
        scenario: Option<&Scenario>,
        faults: &[EntryKey],
        tick_rate: f64,
    ) -> Result<Snapshot, ServiceError> {
        for &(p, e) in faults {
            if self.plant.program(p).is_none_or(|s| e >= s.entries.len()) {
                return Err(ServiceError::Invalid(format!("fault ({p}, {e}) names no program entry")));
            }
        }
        let id = Uuid::new_v4();
        let panel = PanelState::power_on(spec, &self.plant);
        let (plant, panel, _) = reconcile(&self.plant, &panel);
        self.plant = plant;
        self.faults.extend(faults.iter().copied());
        if let Some(s) = scenario {
            self.faults.extend(s.faults.iter().copied());
        }
        let mut checklist = scenario.map(|s| Checklist::new(s, self.plant.clock));
        if let Some(c) = &mut checklist {
            c.advance(&self.plant, &panel);
        }
        let view = PanelView::build(&self.plant, &panel, checklist.as_ref().map(Checklist::view));
        let (tx, _) = broadcast::channel(CHANNEL_CAPACITY);
        self.sessions.insert(
            id,
            SessionState {
                id,
                panel,
                checklist,
                log: Vec::new(),
                version: 0,
                view,
                tx,
                operator_connected: false,
            },
        );
        Ok(self.snapshot(id, tick_rate).expect("just inserted"))
    }

    pub fn snapshot(&self, id: Uuid, tick_rate: f64) -> Option<Snapshot> {
        let s = self.sessions.get(&id)?;
        Some(Snapshot {
            session_id: id,
            plant_id: self.plant_id.clone(),
            spec: s.panel.spec.clone(),
            version: s.version,
            tick_rate,
            digest: s.view.digest(),
            view: s.view.clone(),
        })
    }

    fn session(&self, id: Uuid) -> Result<&SessionState, ServiceError> {
        self.sessions.get(&id).ok_or(ServiceError::Gone(id))
    }

    /// Advances the shared clock, running every program step once.
    fn advance(&mut self, dt: f64) -> Result<Vec<ProgramEvent>, ServiceError> {
        let ids: Vec<Uuid> = self.sessions.keys().copied().collect();
        let Some((&first, rest)) = ids.split_first() else {
            return Ok(Vec::new());
        };
        let (plant, panel, events) =
            step_program(&self.plant, &self.sessions[&first].panel, dt, &self.faults).map_err(invalid)?;
        self.plant = plant;
        self.sessions.get_mut(&first).expect("listed").panel = panel;
        for id in rest {
            let s = self.sessions.get_mut(id).expect("listed");
            for e in &events {
                if let ProgramEvent::Issued { change: Some(c), .. } = e {
                    note_change(&mut s.panel, c);
                }
            }
            let (plant, panel, _) = reconcile(&self.plant, &s.panel);
            self.plant = plant;
            s.panel = panel;
        }
        for s in self.sessions.values_mut() {
            s.log.push(LogRecord::Tick {
                version: s.next_version(),
                dt,
                events: events.clone(),
            });
        }
        Ok(events)
    }

    /// Flags changes on every panel except `except` and re-renders them.
    fn propagate(&mut self, changes: &[ChangeEvent], except: Option<Uuid>, source: CommandSource) {
        for (id, s) in self.sessions.iter_mut() {
            if Some(*id) == except {
                continue;
            }
            for c in changes {
                note_change(&mut s.panel, &ChangeEvent { source, ..*c });
            }
            let (plant, panel, _) = reconcile(&self.plant, &s.panel);
            self.plant = plant;
            s.panel = panel;
        }
    }

    /// Publishes one transition to every session; returns the delta of the
    /// originating session, if any.
    fn commit(&mut self, cause: Cause) -> Option<Delta> {
        let mut out = None;
        for (id, s) in self.sessions.iter_mut() {
            if let Some(c) = &mut s.checklist {
                c.advance(&self.plant, &s.panel);
            }
            let view = PanelView::build(&self.plant, &s.panel, s.checklist.as_ref().map(Checklist::view));
            s.version += 1;
            let mut delta = Delta::between(s.version, &s.view, &view);
            delta.program_events = cause.program_events.clone();
            delta.changes = cause.changes.clone();
            if cause.origin == Some(*id) {
                delta.outcome = cause.outcome;
                delta.emissions = cause.emissions.clone();
            }
            let fresh: Vec<Prompt> = view
                .prompts
                .iter()
                .filter(|p| !s.view.prompts.contains(p))
                .cloned()
                .collect();
            s.view = view;
            let _ = s.tx.send(Outbound::Delta(Box::new(delta.clone())));
            for p in fresh {
                let _ = s.tx.send(Outbound::Prompt(p));
            }
            if cause.origin == Some(*id) {
                out = Some(delta);
            }
        }
        out
    }

    /// Advances to the event time if it lies ahead, then applies the press.
    pub fn press(&mut self, id: Uuid, ev: &ButtonEvent) -> Result<Delta, ServiceError> {
        self.session(id)?;
        if !ev.timestamp.is_finite() {
            return Err(ServiceError::BadRequest("timestamp must be finite".into()));
        }
        let saved = self.save();
        let mut program_events = Vec::new();
        if ev.timestamp > self.plant.clock {
            program_events = self.advance(ev.timestamp - self.plant.clock)?;
            self.plant.clock = ev.timestamp;
        }
        let event = ButtonEvent::new(ev.kind, self.plant.clock);
        let op = match operate(&self.plant, &self.sessions[&id].panel, &event) {
            Ok(op) => op,
            Err(e) => {
                self.restore(saved);
                return Err(invalid(e));
            }
        };
        self.plant = op.plant;
        let s = self.sessions.get_mut(&id).expect("checked");
        s.panel = op.panel;
        s.log.push(LogRecord::Press {
            version: s.next_version(),
            event,
            outcome: op.outcome,
            emissions: op.emissions.clone(),
            changes: op.changes.clone(),
        });
        self.propagate(&op.changes, Some(id), CommandSource::Remote);
        self.log_peers(id, &op.changes);
        Ok(self
            .commit(Cause {
                origin: Some(id),
                outcome: Some(op.outcome),
                emissions: op.emissions,
                changes: op.changes,
                program_events,
            })
            .expect("origin is live"))
    }

    fn save(&self) -> Saved {
        Saved {
            plant: self.plant.clone(),
            sessions: self
                .sessions
                .iter()
                .map(|(id, s)| (*id, s.panel.clone(), s.log.len()))
                .collect(),
        }
    }

    fn restore(&mut self, saved: Saved) {
        self.plant = saved.plant;
        for (id, panel, len) in saved.sessions {
            if let Some(s) = self.sessions.get_mut(&id) {
                s.panel = panel;
                s.log.truncate(len);
            }
        }
    }

    fn log_peers(&mut self, origin: Uuid, changes: &[ChangeEvent]) {
        if changes.is_empty() {
            return;
        }
        for (id, s) in self.sessions.iter_mut() {
            if *id != origin {
                s.log.push(LogRecord::Peer {
                    version: s.next_version(),
                    changes: changes.to_vec(),
                });
            }
        }
    }

    /// Advances every session on the plant by `dt`.
    pub fn tick(&mut self, origin: Option<Uuid>, dt: f64) -> Result<Option<Delta>, ServiceError> {
        if let Some(id) = origin {
            self.session(id)?;
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(ServiceError::Invalid(format!("tick dt must be positive and finite, got {dt}")));
        }
        if self.sessions.is_empty() {
            return Ok(None);
        }
        let program_events = self.advance(dt)?;
        let changes = program_events
            .iter()
            .filter_map(|e| match e {
                ProgramEvent::Issued { change, .. } => *change,
                _ => None,
            })
            .collect();
        Ok(self.commit(Cause {
            origin,
            changes,
            program_events,
            ..Cause::default()
        }))
    }

    /// Applies a command from outside any panel.
    pub fn remote(&mut self, id: Uuid, unit: UnitRef, desired: Switch) -> Result<Delta, ServiceError> {
        self.session(id)?;
        let emission = CommandEmission {
            target: unit,
            desired,
            source: CommandSource::Remote,
        };
        let (plant, change) = plant_apply(&self.plant, &emission).map_err(invalid)?;
        self.plant = plant;
        let changes: Vec<ChangeEvent> = change.into_iter().collect();
        self.propagate(&changes, None, CommandSource::Remote);
        for s in self.sessions.values_mut() {
            s.log.push(LogRecord::Remote {
                version: s.next_version(),
                emission,
                change,
            });
        }
        Ok(self
            .commit(Cause {
                origin: Some(id),
                emissions: vec![emission],
                changes,
                ..Cause::default()
            })
            .expect("origin is live"))
    }

    /// Removes a session and tells its subscribers why.
    pub fn close(&mut self, id: Uuid, reason: &str) -> bool {
        match self.sessions.remove(&id) {
            Some(s) => {
                let _ = s.tx.send(Outbound::Closed(reason.to_string()));
                true
            }
            None => false,
        }
    }
}
