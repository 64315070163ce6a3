use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::error::PanelError;
use super::plant::{plant_apply, PlantState};
use super::press::note_change;
use super::state::PanelState;
use super::types::{ChangeEvent, CommandEmission, CommandSource};
use crate::io::canonical::fixed6;

/// `(program id, entry index)`.
pub type EntryKey = (usize, usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProgramEvent {
    Started {
        program: usize,
        #[serde(with = "fixed6")]
        at: f64,
    },
    Issued {
        program: usize,
        entry: usize,
        #[serde(with = "fixed6")]
        at: f64,
        change: Option<ChangeEvent>,
    },
    Confirmed {
        program: usize,
        entry: usize,
        #[serde(with = "fixed6")]
        at: f64,
    },
    Overdue {
        program: usize,
        entry: usize,
        #[serde(with = "fixed6")]
        at: f64,
    },
    Completed {
        program: usize,
        #[serde(with = "fixed6")]
        at: f64,
    },
}

/// Advances the clock by `dt`, starts scheduled programs, auto-issues due
/// entries that are not faulted and flags unconfirmed entries past their
/// deadline.
pub fn step_program(
    plant: &PlantState,
    panel: &PanelState,
    dt: f64,
    faults: &BTreeSet<EntryKey>,
) -> Result<(PlantState, PanelState, Vec<ProgramEvent>), PanelError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(PanelError::NonPositiveStep(dt));
    }
    let mut plant = plant.clone();
    let mut panel = panel.clone();
    let mut events = Vec::new();
    let t1 = plant.clock + dt;

    for p in &mut plant.programs {
        if let (None, Some(at)) = (p.start_time, p.scheduled_start) {
            if at <= t1 {
                p.start_time = Some(at);
                p.active = true;
                events.push(ProgramEvent::Started { program: p.id, at });
            }
        }
    }

    let mut due: Vec<(f64, usize, usize)> = Vec::new();
    for (pi, p) in plant.programs.iter().enumerate() {
        if !p.active {
            continue;
        }
        for (e, prog) in p.progress.iter().enumerate() {
            let Some(t) = p.due_time(e) else { continue };
            if t <= t1 && !prog.auto_issued && !faults.contains(&(p.id, e)) {
                due.push((t, pi, e));
            }
        }
    }
    due.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (t, pi, e) in due {
        let entry = plant.programs[pi].entries[e].clone();
        let emission = CommandEmission {
            target: entry.target,
            desired: entry.desired,
            source: CommandSource::Automatic,
        };
        let (next, change) = plant_apply(&plant, &emission)?;
        plant = next;
        let p = &mut plant.programs[pi];
        p.progress[e].auto_issued = true;
        p.progress[e].confirmed_at = Some(t);
        if let Some(c) = &change {
            note_change(&mut panel, c);
        }
        events.push(ProgramEvent::Issued {
            program: p.id,
            entry: e,
            at: t,
            change,
        });
        events.push(ProgramEvent::Confirmed {
            program: p.id,
            entry: e,
            at: t,
        });
    }

    plant.clock = t1;
    let (plant, panel, more) = reconcile(&plant, &panel);
    events.extend(more);
    Ok((plant, panel, events))
}

/// Confirms due entries whose target already holds the desired state,
/// recomputes overdue flags, retires completed programs and re-renders,
/// all at the current clock.
pub fn reconcile(plant: &PlantState, panel: &PanelState) -> (PlantState, PanelState, Vec<ProgramEvent>) {
    let mut plant = plant.clone();
    let mut panel = panel.clone();
    let mut events = Vec::new();
    let now = plant.clock;
    let states: Vec<_> = plant
        .programs
        .iter()
        .map(|p| p.entries.iter().map(|e| plant.state(e.target)).collect::<Vec<_>>())
        .collect();
    let mut overdue = BTreeSet::new();
    for (p, current) in plant.programs.iter_mut().zip(states) {
        if !p.active {
            continue;
        }
        for e in 0..p.entries.len() {
            if p.progress[e].confirmed_at.is_some() {
                continue;
            }
            let (Some(due), Some(deadline)) = (p.due_time(e), p.deadline_time(e)) else {
                continue;
            };
            if now >= due && current[e] == Some(p.entries[e].desired) {
                p.progress[e].confirmed_at = Some(now);
                events.push(ProgramEvent::Confirmed {
                    program: p.id,
                    entry: e,
                    at: now,
                });
            } else if now > deadline {
                overdue.insert((p.id, e));
                if !panel.overdue_entries.contains(&(p.id, e)) {
                    events.push(ProgramEvent::Overdue {
                        program: p.id,
                        entry: e,
                        at: now,
                    });
                }
            }
        }
        if p.completed() {
            p.active = false;
            events.push(ProgramEvent::Completed {
                program: p.id,
                at: now,
            });
        }
    }
    panel.overdue_entries = overdue;
    panel.refresh(&plant);
    (plant, panel, events)
}
