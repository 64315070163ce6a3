use serde::{Deserialize, Serialize};

use super::error::SynthesisError;
use super::matrix::synthesize_matrix;
use super::scale::{enumerate_scale, CompressionProfile};
use crate::io::canonical::fixed6;
use crate::operator::{estimate_time, Step, TimeModelParams};
use crate::panel::{Family, PanelSpec, PlantState, ProgramEntry, ProgramSchedule, Switch};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraints {
    #[serde(default)]
    pub max_controls: Option<usize>,
    #[serde(default)]
    pub max_indicators: Option<usize>,
    #[serde(default, with = "fixed6::option")]
    pub max_task_time: Option<f64>,
    /// Require a panel that stays serviceable under g-load.
    #[serde(default)]
    pub g_load_serviceable: bool,
}

impl Constraints {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisResult {
    pub family: Family,
    pub spec: PanelSpec,
    pub profile: CompressionProfile,
    pub controls: usize,
    pub indicators: usize,
    /// Mean set-unit time over every unit, from a freshly powered panel.
    #[serde(with = "fixed6")]
    pub task_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rejection {
    pub family: Family,
    pub violated: Vec<String>,
}

/// Plant of `n_units` packed into systems that fit `spec`. Program panels get
/// one program per selector whose entries switch consecutive units on.
pub fn synthetic_plant(n_units: usize, spec: &PanelSpec) -> Result<PlantState, SynthesisError> {
    let pairs = synthesize_matrix(n_units, true)?.units_per_select();
    let per_system = match spec.family {
        Family::MatrixExpanded | Family::MatrixMatrix => spec.command_pairs(),
        _ => pairs,
    };
    let mut plant = PlantState::packed("synthetic", n_units, per_system);
    if let (Family::ProgramPanel, Some((s, b))) = (spec.family, spec.matrix()) {
        for i in 0..s {
            let entries: Vec<ProgramEntry> = (0..b)
                .filter_map(|j| plant.unit_at(i * b + j))
                .enumerate()
                .map(|(j, target)| ProgramEntry {
                    issue_offset: j as f64,
                    target,
                    desired: Switch::On,
                    deadline_offset: j as f64 + 10.0,
                })
                .collect();
            if !entries.is_empty() {
                plant.programs.push(ProgramSchedule::new(i, format!("P{}", i + 1), entries));
            }
        }
    }
    Ok(plant)
}

fn mean_set_time(spec: &PanelSpec, n_units: usize, params: &TimeModelParams) -> Result<f64, SynthesisError> {
    let plant = synthetic_plant(n_units, spec)?;
    let units: Vec<_> = if spec.family == Family::ProgramPanel {
        plant.programs.iter().flat_map(|p| p.entries.iter().map(|e| e.target)).collect()
    } else {
        plant.units().collect()
    };
    let mut total = 0.0;
    for &unit in &units {
        let step = Step::SetUnit {
            unit,
            desired: Switch::On,
        };
        total += estimate_time(spec, &plant, &step, params)
            .map_err(|e| SynthesisError::InvalidInput(e.to_string()))?;
    }
    Ok(total / units.len().max(1) as f64)
}

/// Candidate panels satisfying every constraint. Without constraints the
/// whole scale is returned in scale order; otherwise candidates are ranked by
/// control count, then by task time.
pub fn choose_panel(
    n_units: usize,
    constraints: &Constraints,
    params: &TimeModelParams,
) -> Result<Vec<SynthesisResult>, SynthesisError> {
    let mut feasible = Vec::new();
    let mut rejected = Vec::new();
    for entry in enumerate_scale(n_units)? {
        let controls = entry.profile.controls;
        let indicators = entry.profile.indicators;
        let task_time = mean_set_time(&entry.spec, n_units, params)?;
        let mut violated = Vec::new();
        if let Some(max) = constraints.max_controls {
            if controls > max {
                violated.push(format!("max_controls: {controls} > {max}"));
            }
        }
        if let Some(max) = constraints.max_indicators {
            if indicators > max {
                violated.push(format!("max_indicators: {indicators} > {max}"));
            }
        }
        if let Some(max) = constraints.max_task_time {
            if task_time > max {
                violated.push(format!("max_task_time: {task_time:.3} s > {max:.3} s"));
            }
        }
        if constraints.g_load_serviceable && entry.family == Family::MultiChannel {
            violated.push("g_load_serviceable: multi-channel panels are unserviceable under g-load".into());
        }
        if violated.is_empty() {
            feasible.push(SynthesisResult {
                family: entry.family,
                spec: entry.spec,
                profile: entry.profile,
                controls,
                indicators,
                task_time,
            });
        } else {
            rejected.push(Rejection {
                family: entry.family,
                violated,
            });
        }
    }
    if feasible.is_empty() {
        return Err(SynthesisError::NoFeasiblePanel(rejected));
    }
    if !constraints.is_empty() {
        feasible.sort_by(|a, b| a.controls.cmp(&b.controls).then(a.task_time.total_cmp(&b.task_time)));
    }
    Ok(feasible)
}
