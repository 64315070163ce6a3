//! Wire counts, a linear mass/area/power model normalized to a baseline
//! panel, and response-time tables.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::canonical::fixed6;
use crate::operator::{estimate_time, OperatorError, Step, TimeModelParams};
use crate::panel::{Family, Geometry, PanelSpec, PlantState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("panel {spec} cannot serve {n_units} units")]
    Unbound { spec: String, n_units: usize },
    #[error("baseline {0} is not among the compared panels")]
    UnknownBaseline(String),
    #[error("baseline value for {0} is zero")]
    ZeroBaseline(&'static str),
    #[error("cost coefficient {0} must be positive and finite")]
    InvalidCoefficient(&'static str),
    #[error(transparent)]
    Time(#[from] OperatorError),
}

/// Command-row and signal-row wire counts.
pub fn wire_counts(spec: &PanelSpec, n_units: usize) -> Result<(usize, usize), MetricsError> {
    if n_units == 0 || spec.validate().is_err() || spec.capacity() < n_units {
        return Err(MetricsError::Unbound {
            spec: spec.id.clone(),
            n_units,
        });
    }
    let controls = spec.control_count();
    let counts = match (&spec.family, &spec.geometry) {
        (Family::SingleChannel, _) => (1, 1),
        (Family::MultiChannel, _) => (2 * n_units, n_units),
        (Family::MatrixExpanded, _) => (controls, n_units),
        (Family::MatrixMatrix, Geometry::Matrix { select_buttons, .. }) => {
            (controls, spec.command_pairs() + select_buttons)
        }
        // One LED line per selector and per entry button.
        (Family::ProgramPanel, _) => (controls, spec.indicator_count()),
        // Expanded field: one signal line per unit.
        (Family::Hierarchical, _) => (controls, n_units),
        // Screen driven as a row-by-column matrix.
        (Family::AddressPanel, Geometry::Screens { rows, cols, .. }) => (controls, rows + cols),
        _ => (controls, spec.indicator_count()),
    };
    Ok(counts)
}

/// Unit costs of the linear engineering model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostCoefficients {
    #[serde(with = "fixed6")]
    pub mass_per_control: f64,
    #[serde(with = "fixed6")]
    pub mass_per_indicator: f64,
    #[serde(with = "fixed6")]
    pub mass_per_wire: f64,
    /// Whether relative mass includes wiring or only the panel.
    pub mass_includes_wiring: bool,
    #[serde(with = "fixed6")]
    pub area_per_control: f64,
    #[serde(with = "fixed6")]
    pub area_per_indicator: f64,
    #[serde(with = "fixed6")]
    pub power_per_indicator: f64,
    #[serde(with = "fixed6")]
    pub power_per_control: f64,
}

impl Default for CostCoefficients {
    fn default() -> Self {
        Self {
            mass_per_control: 1.0,
            mass_per_indicator: 0.5,
            mass_per_wire: 0.2,
            mass_includes_wiring: true,
            area_per_control: 1.0,
            area_per_indicator: 0.6,
            power_per_indicator: 1.0,
            power_per_control: 0.1,
        }
    }
}

impl CostCoefficients {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let all = [
            ("mass_per_control", self.mass_per_control),
            ("mass_per_indicator", self.mass_per_indicator),
            ("mass_per_wire", self.mass_per_wire),
            ("area_per_control", self.area_per_control),
            ("area_per_indicator", self.area_per_indicator),
            ("power_per_indicator", self.power_per_indicator),
            ("power_per_control", self.power_per_control),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(MetricsError::InvalidCoefficient(name));
            }
        }
        Ok(())
    }
}

/// Absolute model values of one panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsoluteMetrics {
    pub controls: usize,
    pub indicators: usize,
    pub nprkl: usize,
    pub nprsl: usize,
    #[serde(with = "fixed6")]
    pub panel_mass: f64,
    #[serde(with = "fixed6")]
    pub wire_mass: f64,
    #[serde(with = "fixed6")]
    pub mass: f64,
    #[serde(with = "fixed6")]
    pub area: f64,
    #[serde(with = "fixed6")]
    pub power: f64,
}

pub fn absolute_metrics(
    spec: &PanelSpec,
    n_units: usize,
    c: &CostCoefficients,
) -> Result<AbsoluteMetrics, MetricsError> {
    let (nprkl, nprsl) = wire_counts(spec, n_units)?;
    let controls = spec.control_count();
    let indicators = spec.indicator_count();
    let panel_mass = c.mass_per_control * controls as f64 + c.mass_per_indicator * indicators as f64;
    let wire_mass = c.mass_per_wire * (nprkl + nprsl) as f64;
    Ok(AbsoluteMetrics {
        controls,
        indicators,
        nprkl,
        nprsl,
        panel_mass,
        wire_mass,
        mass: if c.mass_includes_wiring {
            panel_mass + wire_mass
        } else {
            panel_mass
        },
        area: c.area_per_control * controls as f64 + c.area_per_indicator * indicators as f64,
        power: c.power_per_indicator * indicators as f64 + c.power_per_control * controls as f64,
    })
}

/// One panel's metrics relative to the baseline panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsRow {
    pub spec_id: String,
    pub family: Family,
    pub absolute: AbsoluteMetrics,
    #[serde(with = "fixed6")]
    pub nprkl: f64,
    #[serde(with = "fixed6")]
    pub nprsl: f64,
    #[serde(with = "fixed6")]
    pub g: f64,
    #[serde(with = "fixed6")]
    pub s_area: f64,
    #[serde(with = "fixed6")]
    pub w: f64,
}

impl MetricsRow {
    pub fn relative(&self) -> [f64; 5] {
        [self.nprkl, self.nprsl, self.g, self.s_area, self.w]
    }
}

pub const RELATIVE_FIELDS: [&str; 5] = ["nprkl", "nprsl", "g", "s_area", "w"];

pub fn relative_metrics(
    specs: &[PanelSpec],
    n_units: usize,
    baseline: &str,
    coefficients: &CostCoefficients,
) -> Result<Vec<MetricsRow>, MetricsError> {
    coefficients.validate()?;
    let abs: Vec<AbsoluteMetrics> = specs
        .iter()
        .map(|s| absolute_metrics(s, n_units, coefficients))
        .collect::<Result<_, _>>()?;
    let base = specs
        .iter()
        .position(|s| s.id == baseline)
        .map(|i| abs[i])
        .ok_or_else(|| MetricsError::UnknownBaseline(baseline.to_string()))?;
    let base_vals = [
        base.nprkl as f64,
        base.nprsl as f64,
        base.mass,
        base.area,
        base.power,
    ];
    for (v, name) in base_vals.iter().zip(RELATIVE_FIELDS) {
        if *v == 0.0 {
            return Err(MetricsError::ZeroBaseline(name));
        }
    }
    Ok(specs
        .iter()
        .zip(abs)
        .map(|(spec, a)| {
            let vals = [a.nprkl as f64, a.nprsl as f64, a.mass, a.area, a.power];
            let r: Vec<f64> = vals.iter().zip(base_vals).map(|(v, b)| v / b).collect();
            MetricsRow {
                spec_id: spec.id.clone(),
                family: spec.family,
                absolute: a,
                nprkl: r[0],
                nprsl: r[1],
                g: r[2],
                s_area: r[3],
                w: r[4],
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseRow {
    pub task: Step,
    #[serde(with = "fixed6::vec")]
    pub seconds: Vec<f64>,
    /// Per panel: within 10% of the fastest panel on this task.
    pub within_10pct: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseTable {
    pub spec_ids: Vec<String>,
    pub rows: Vec<ResponseRow>,
}

/// Estimated time of each task on each panel, one row per task.
pub fn response_time_table(
    panels: &[(PanelSpec, PlantState)],
    tasks: &[Step],
    params: &TimeModelParams,
) -> Result<ResponseTable, MetricsError> {
    let mut rows = Vec::with_capacity(tasks.len());
    for task in tasks {
        let seconds: Vec<f64> = panels
            .iter()
            .map(|(spec, plant)| estimate_time(spec, plant, task, params))
            .collect::<Result<_, _>>()?;
        let min = seconds.iter().copied().fold(f64::INFINITY, f64::min);
        let within_10pct = seconds.iter().map(|&t| t <= min * 1.1 + 1e-12).collect();
        rows.push(ResponseRow {
            task: *task,
            seconds,
            within_10pct,
        });
    }
    Ok(ResponseTable {
        spec_ids: panels.iter().map(|(s, _)| s.id.clone()).collect(),
        rows,
    })
}
