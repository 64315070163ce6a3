use std::collections::BTreeSet;

use super::error::OperatorError;
use super::log::{CheckTarget, ClassTotals, Detail, LogEntry, OpClass, SessionLog};
use super::scenario::{Scenario, Step};
use super::time_model::TimeModelParams;
use crate::panel::sequential::{encode_sequential, CommandCatalog, Pulse};
use crate::panel::spec::Geometry;
use crate::panel::state::Binding;
use crate::panel::{
    operate, step_program, ButtonEvent, ButtonKind, CommandEmission, EntryKey, Family, Layout,
    PanelSpec, PanelState, PlantState, PressOutcome, ProgramEvent, Switch, UnitRef,
};

/// First `(program index, entry index)` whose target is `unit` and, when
/// given, whose desired state matches.
pub(crate) fn entry_for(plant: &PlantState, unit: UnitRef, desired: Option<Switch>) -> Option<(usize, usize)> {
    plant.programs.iter().enumerate().find_map(|(pi, p)| {
        p.entries
            .iter()
            .position(|e| e.target == unit && desired.is_none_or(|d| d == e.desired))
            .map(|e| (pi, e))
    })
}

/// Keypad digits addressing `flat` on a hierarchical panel.
pub(crate) fn hierarchy_digits(branching: &[usize], mut flat: usize) -> Vec<u8> {
    let mut digits = vec![0u8; branching.len()];
    for (i, &b) in branching.iter().enumerate().rev() {
        digits[i] = (flat % b + 1) as u8;
        flat /= b;
    }
    digits
}

/// Keypad digits addressing `flat` on an address panel, each paired with the
/// number of alternatives the operator chooses among.
pub(crate) fn address_digits(spec: &PanelSpec, flat: usize) -> Vec<(u8, usize)> {
    let Geometry::Screens {
        rows,
        cols,
        screens,
        keypad,
    } = spec.geometry
    else {
        return Vec::new();
    };
    let per = rows * cols;
    let (mut screen, cell) = (flat / per, flat % per);
    let sd = spec.screen_digits();
    let mut out = vec![(0u8, screens.min(keypad)); sd];
    for slot in out.iter_mut().rev() {
        slot.0 = (screen % keypad + 1) as u8;
        screen /= keypad;
    }
    if spec.cell_digits() == 1 {
        out.push((cell as u8 + 1, per));
    } else {
        out.push(((cell / cols) as u8 + 1, rows));
        out.push(((cell % cols) as u8 + 1, cols));
    }
    out
}

fn unsupported(step: usize, family: Family, what: &'static str) -> OperatorError {
    OperatorError::Unsupported { step, family, what }
}

/// Checks every step against the panel and plant before anything runs.
pub fn validate_scenario(spec: &PanelSpec, plant: &PlantState, scenario: &Scenario) -> Result<(), OperatorError> {
    spec.check_binding(plant)?;
    plant.validate()?;
    for &(pid, e) in &scenario.faults {
        let ok = plant.program(pid).is_some_and(|p| e < p.entries.len());
        if !ok {
            return Err(OperatorError::InvalidScenario(format!(
                "fault references unknown entry ({pid}, {e})"
            )));
        }
    }
    let family = spec.family;
    for (i, step) in scenario.steps.iter().enumerate() {
        let bad = |m: String| OperatorError::InvalidStep { step: i, message: m };
        match *step {
            Step::VerifyUnit { unit, .. } | Step::SetUnit { unit, .. } => {
                if !plant.contains(unit) {
                    return Err(bad(format!("unknown unit {unit}")));
                }
                if family == Family::ProgramPanel {
                    let desired = match *step {
                        Step::SetUnit { desired, .. } => Some(desired),
                        _ => None,
                    };
                    if entry_for(plant, unit, desired).is_none() {
                        return Err(bad(format!(
                            "program panel can only reach units scheduled in a program; {unit} is not"
                        )));
                    }
                }
            }
            Step::AwaitProgramLabel { program, entry } => {
                let Some(p) = plant.program(program) else {
                    return Err(bad(format!("unknown program {program}")));
                };
                if entry >= p.entries.len() {
                    return Err(bad(format!("program {program} has no entry {entry}")));
                }
                if p.scheduled_start.is_none() && p.start_time.is_none() && family != Family::ProgramPanel {
                    return Err(bad(format!(
                        "program {program} never starts: no scheduled start and no program selector"
                    )));
                }
                if family == Family::SingleChannel {
                    return Err(unsupported(i, family, "monitoring a program step"));
                }
                if family == Family::ProgramPanel {
                    let p = plant.program(program).expect("checked above");
                    for e in p.step_of(entry) {
                        let x = &p.entries[e];
                        if entry_for(plant, x.target, Some(x.desired)).is_none() {
                            return Err(bad(format!("entry {e} is not reachable from its program button")));
                        }
                    }
                }
            }
            Step::FullStatusSweep => {
                if matches!(family, Family::SingleChannel | Family::ProgramPanel) {
                    return Err(unsupported(i, family, "a full status sweep"));
                }
            }
            Step::Wait { seconds } => {
                if !seconds.is_finite() || seconds < 0.0 {
                    return Err(bad(format!("wait of {seconds} s")));
                }
            }
        }
    }
    Ok(())
}

struct Runner<'a> {
    params: &'a TimeModelParams,
    faults: &'a BTreeSet<EntryKey>,
    plant: PlantState,
    panel: PanelState,
    rows: Layout,
    entries: Vec<LogEntry>,
    events: Vec<ProgramEvent>,
    busy: f64,
    step: usize,
}

impl Runner<'_> {
    fn spec(&self) -> &PanelSpec {
        &self.panel.spec
    }

    fn advance(&mut self, dt: f64) -> Result<(), OperatorError> {
        if dt > 0.0 {
            let (plant, panel, events) = step_program(&self.plant, &self.panel, dt, self.faults)?;
            self.plant = plant;
            self.panel = panel;
            self.events.extend(events);
        }
        Ok(())
    }

    fn busy_for(&mut self, dt: f64) -> Result<(), OperatorError> {
        self.busy += dt;
        self.advance(dt)
    }

    fn press(&mut self, kind: ButtonKind, class: OpClass, decide: Option<usize>) -> Result<PressOutcome, OperatorError> {
        let dt = decide.map_or(0.0, |a| self.params.decide(a)) + self.params.t_press;
        self.busy_for(dt)?;
        let event = ButtonEvent::new(kind, self.plant.clock);
        let op = operate(&self.plant, &self.panel, &event)?;
        self.plant = op.plant;
        self.panel = op.panel;
        self.entries.push(LogEntry {
            time: self.plant.clock,
            step: self.step,
            op_class: class,
            detail: Detail::Press {
                event,
                outcome: op.outcome,
                emissions: op.emissions,
            },
        });
        Ok(op.outcome)
    }

    fn check(
        &mut self,
        target: CheckTarget,
        cells: Vec<usize>,
        class: OpClass,
        decide: Option<usize>,
        expect_lit: Option<bool>,
    ) -> Result<(), OperatorError> {
        let dt = decide.map_or(0.0, |a| self.params.decide(a)) + self.params.t_check;
        self.busy_for(dt)?;
        let frame = &self.panel.indicator_frame;
        let lit: Vec<usize> = cells
            .iter()
            .copied()
            .filter(|&c| frame.cells.get(c).is_some_and(|x| x.lit))
            .collect();
        let ok = expect_lit.map(|want| cells.len() == 1 && (lit.len() == 1) == want);
        self.entries.push(LogEntry {
            time: self.plant.clock,
            step: self.step,
            op_class: class,
            detail: Detail::Check {
                target,
                cells,
                lit,
                ok,
            },
        });
        Ok(())
    }

    fn unit_cell(&self, unit: UnitRef) -> Vec<usize> {
        self.panel.indicator_frame.cell_of(unit).into_iter().collect()
    }

    fn check_unit(&mut self, unit: UnitRef, class: OpClass, decide: Option<usize>, expected: Switch) -> Result<(), OperatorError> {
        let cells = self.unit_cell(unit);
        self.check(CheckTarget::Unit { unit }, cells, class, decide, Some(expected.is_on()))
    }

    fn all_cells(&self) -> Vec<usize> {
        (0..self.panel.indicator_frame.len()).collect()
    }

    fn select(&mut self, index: usize, class: OpClass, decide: bool) -> Result<bool, OperatorError> {
        if self.panel.selected_system == Some(index) {
            return Ok(false);
        }
        let s = self.spec().matrix().map_or(0, |m| m.0);
        self.press(ButtonKind::SelectSystem { index }, class, decide.then_some(s))?;
        Ok(true)
    }

    fn key_code(&mut self, unit: UnitRef, desired: Switch, class: OpClass) -> Result<(), OperatorError> {
        let catalog = CommandCatalog::from_plant(&self.plant);
        let code = encode_sequential(&CommandEmission::operator(unit, desired), &catalog)
            .map_err(|e| OperatorError::InvalidStep {
                step: self.step,
                message: e.to_string(),
            })?;
        for p in code {
            let kind = match p {
                Pulse::Pulse => ButtonKind::Pulse,
                Pulse::Gap => ButtonKind::Gap,
            };
            self.press(kind, class, None)?;
        }
        Ok(())
    }

    fn key_hierarchy(&mut self, unit: UnitRef, class: OpClass) -> Result<usize, OperatorError> {
        let branching = self.spec().branching().to_vec();
        if self.panel.selected_unit == Some(unit) && self.panel.digits.len() == branching.len() {
            return Ok(0);
        }
        let flat = self.plant.flat_index(unit).expect("validated unit");
        for (d, &b) in hierarchy_digits(&branching, flat).into_iter().zip(&branching) {
            self.press(ButtonKind::Digit { digit: d }, class, Some(b))?;
        }
        Ok(branching.len())
    }

    fn key_address(&mut self, unit: UnitRef, class: OpClass, decide: bool) -> Result<usize, OperatorError> {
        let flat = self.plant.flat_index(unit).expect("validated unit");
        let digits = address_digits(self.spec(), flat);
        let n = digits.len();
        for (d, alternatives) in digits {
            self.press(ButtonKind::Digit { digit: d }, class, decide.then_some(alternatives))?;
        }
        Ok(n)
    }

    fn screen_of(&self, unit: UnitRef) -> usize {
        let per = match self.spec().geometry {
            Geometry::Screens { rows, cols, .. } => rows * cols,
            _ => 1,
        };
        self.plant.flat_index(unit).expect("validated unit") / per
    }

    fn screen_visible(&self, unit: UnitRef) -> bool {
        self.panel.selected_screen == Some(self.screen_of(unit)) && self.panel.digits.is_empty()
    }

    fn verify(&mut self, unit: UnitRef, expected: Switch) -> Result<(), OperatorError> {
        let spec = self.spec().clone();
        match spec.family {
            Family::SingleChannel => {
                self.key_code(unit, expected, OpClass::L)?;
                self.check(CheckTarget::Confirmation, vec![0], OpClass::K, None, None)
            }
            Family::MultiChannel | Family::MatrixExpanded | Family::Hierarchical => {
                self.check_unit(unit, OpClass::K, Some(spec.indicator_count()), expected)
            }
            Family::MatrixMatrix => {
                self.select(unit.system, OpClass::L, true)?;
                self.check_unit(unit, OpClass::K, Some(spec.command_pairs()), expected)
            }
            Family::ProgramPanel => {
                let (pi, e) = entry_for(&self.plant, unit, None).expect("validated");
                self.select(pi, OpClass::L, true)?;
                let b = spec.matrix().map_or(0, |m| m.1);
                let pid = self.plant.programs[pi].id;
                let cells = self.entry_cells(pid, &[e]);
                self.check(CheckTarget::Entry { program: pid, entry: e }, cells, OpClass::K, Some(b), None)
            }
            Family::AddressPanel => {
                if self.screen_visible(unit) {
                    self.check_unit(unit, OpClass::K, Some(spec.indicator_count()), expected)
                } else {
                    self.key_address(unit, OpClass::L, true)?;
                    self.check_unit(unit, OpClass::K, None, expected)
                }
            }
        }
    }

    fn entry_cells(&self, program: usize, entries: &[usize]) -> Vec<usize> {
        self.panel
            .indicator_frame
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c.binding, Binding::Entry { program: p, entry } if p == program && entries.contains(&entry)))
            .map(|(i, _)| i)
            .collect()
    }

    fn guarded_press(&mut self, unit: UnitRef, kind: ButtonKind, decide: Option<usize>) -> Result<(), OperatorError> {
        let guarded = self.spec().safety_guarded.contains(&unit);
        if guarded {
            self.press(ButtonKind::GuardToggle, OpClass::U, None)?;
        }
        self.press(kind, OpClass::U, decide)?;
        if guarded {
            self.press(ButtonKind::GuardToggle, OpClass::U, None)?;
        }
        Ok(())
    }

    fn set(&mut self, unit: UnitRef, desired: Switch) -> Result<(), OperatorError> {
        let spec = self.spec().clone();
        let stages;
        match spec.family {
            Family::SingleChannel => {
                let guarded = spec.safety_guarded.contains(&unit);
                if guarded {
                    self.press(ButtonKind::GuardToggle, OpClass::U, None)?;
                }
                self.key_code(unit, desired, OpClass::U)?;
                if guarded {
                    self.press(ButtonKind::GuardToggle, OpClass::U, None)?;
                }
                return self.check(CheckTarget::Confirmation, vec![0], OpClass::K, None, Some(true));
            }
            Family::MultiChannel => {
                let flat = self.plant.flat_index(unit).expect("validated unit");
                stages = 1;
                self.think(stages)?;
                self.guarded_press(
                    unit,
                    ButtonKind::Command {
                        index: flat,
                        switch: desired,
                    },
                    Some(spec.control_count()),
                )?;
            }
            Family::MatrixExpanded | Family::MatrixMatrix => {
                let b = spec.matrix().map_or(0, |m| m.1);
                stages = 1 + usize::from(self.select(unit.system, OpClass::K, true)?);
                self.think(stages)?;
                self.guarded_press(
                    unit,
                    ButtonKind::Command {
                        index: unit.unit,
                        switch: desired,
                    },
                    Some(b),
                )?;
            }
            Family::ProgramPanel => {
                let (pi, e) = entry_for(&self.plant, unit, Some(desired)).expect("validated");
                let b = spec.matrix().map_or(0, |m| m.1);
                stages = 1 + usize::from(self.select(pi, OpClass::K, true)?);
                self.think(stages)?;
                self.guarded_press(unit, ButtonKind::Command { index: e, switch: desired }, Some(b))?;
                let pid = self.plant.programs[pi].id;
                let cells = self.entry_cells(pid, &[e]);
                return self.check(CheckTarget::Entry { program: pid, entry: e }, cells, OpClass::K, None, Some(true));
            }
            Family::Hierarchical => {
                stages = self.key_hierarchy(unit, OpClass::K)?;
                self.think(stages)?;
                self.guarded_press(unit, ButtonKind::Command { index: 0, switch: desired }, None)?;
            }
            Family::AddressPanel => {
                stages = if self.panel.selected_unit == Some(unit) && self.panel.digits.is_empty() {
                    0
                } else {
                    self.key_address(unit, OpClass::K, true)?
                };
                self.think(stages)?;
                self.guarded_press(unit, ButtonKind::Command { index: 0, switch: desired }, None)?;
            }
        }
        self.check_unit(unit, OpClass::K, None, desired)
    }

    fn think(&mut self, stages: usize) -> Result<(), OperatorError> {
        let dt = self.params.stage_term(stages);
        self.busy_for(dt)
    }

    fn row_cells(&self, units: &[UnitRef]) -> Vec<usize> {
        units.iter().filter_map(|&u| self.panel.indicator_frame.cell_of(u)).collect()
    }

    /// Reads every row of an information field that shows all units.
    fn scan_rows(&mut self, rows: &[usize], class: OpClass) -> Result<(), OperatorError> {
        for &r in rows {
            let row = self.rows.rows[r].clone();
            let cells = self.row_cells(&row.units);
            self.check(CheckTarget::Row { row: row.id }, cells, class, None, None)?;
        }
        Ok(())
    }

    fn o_loop(&mut self) -> Result<(), OperatorError> {
        let s = self.spec().matrix().map_or(0, |m| m.0);
        for i in 0..s {
            self.press(ButtonKind::SelectSystem { index: i }, OpClass::O, None)?;
            let row = self
                .plant
                .systems
                .get(i)
                .map_or_else(|| format!("selector-{}", i + 1), |sys| sys.name.clone());
            let cells = self.all_cells();
            self.check(CheckTarget::Row { row }, cells, OpClass::O, None, None)?;
        }
        Ok(())
    }

    fn visit_screen(&mut self, screen: usize, class: OpClass) -> Result<(), OperatorError> {
        let per = match self.spec().geometry {
            Geometry::Screens { rows, cols, .. } => rows * cols,
            _ => 1,
        };
        if self.panel.selected_screen != Some(screen) || !self.panel.digits.is_empty() {
            if let Some(u) = self.plant.unit_at(screen * per) {
                self.key_address(u, class, false)?;
            }
        }
        let cells = self.all_cells();
        self.check(CheckTarget::Screen { screen }, cells, class, None, None)
    }

    fn screen_rows(&self) -> Vec<Vec<usize>> {
        match self.spec().geometry {
            Geometry::Screens { rows, cols, .. } => {
                (0..rows).map(|r| (r * cols..(r + 1) * cols).collect()).collect()
            }
            _ => Vec::new(),
        }
    }

    fn sweep(&mut self) -> Result<(), OperatorError> {
        let spec = self.spec().clone();
        match spec.family {
            Family::MatrixMatrix => self.o_loop(),
            Family::AddressPanel if spec.screen_digits() > 0 => {
                let screens = match spec.geometry {
                    Geometry::Screens { screens, .. } => screens,
                    _ => 0,
                };
                (0..screens).try_for_each(|s| self.visit_screen(s, OpClass::O))
            }
            Family::AddressPanel => {
                for (r, cells) in self.screen_rows().into_iter().enumerate() {
                    self.check(CheckTarget::Row { row: format!("row-{}", r + 1) }, cells, OpClass::K, None, None)?;
                }
                Ok(())
            }
            _ => {
                let rows: Vec<usize> = (0..self.rows.rows.len()).collect();
                self.scan_rows(&rows, OpClass::K)
            }
        }
    }

    fn await_label(&mut self, program: usize, entry: usize) -> Result<(), OperatorError> {
        let pi = self.plant.program_index(program).expect("validated");
        let spec = self.spec().clone();
        if self.plant.programs[pi].start_time.is_none() && self.plant.programs[pi].scheduled_start.is_none() {
            self.select(pi, OpClass::K, true)?;
        }
        let p = &self.plant.programs[pi];
        let start = p.start_time.or(p.scheduled_start).expect("program starts");
        let due = start + p.entries[entry].issue_offset;
        if due > self.plant.clock {
            self.advance(due - self.plant.clock)?;
        }
        let batch = self.plant.programs[pi].step_of(entry);
        let faulted: Vec<usize> = batch
            .iter()
            .copied()
            .filter(|&e| self.faults.contains(&(program, e)))
            .collect();
        if !faulted.is_empty() {
            let p = &self.plant.programs[pi];
            let latest = faulted
                .iter()
                .map(|&e| start + p.entries[e].deadline_offset)
                .fold(f64::NEG_INFINITY, f64::max);
            let prompt = latest + 0.1;
            if prompt > self.plant.clock {
                self.advance(prompt - self.plant.clock)?;
            }
            for e in faulted {
                let (target, desired) = {
                    let x = &self.plant.programs[pi].entries[e];
                    (x.target, x.desired)
                };
                self.set(target, desired)?;
            }
        }
        let units: Vec<UnitRef> = batch
            .iter()
            .map(|&e| self.plant.programs[pi].entries[e].target)
            .collect();
        match spec.family {
            Family::MatrixMatrix => self.o_loop(),
            Family::ProgramPanel => {
                self.select(pi, OpClass::O, false)?;
                let cells = self.entry_cells(program, &batch);
                self.check(CheckTarget::Row { row: self.plant.programs[pi].name.clone() }, cells, OpClass::O, None, None)
            }
            Family::AddressPanel if spec.screen_digits() > 0 => {
                let screens: BTreeSet<usize> = units.iter().map(|&u| self.screen_of(u)).collect();
                screens.into_iter().try_for_each(|s| self.visit_screen(s, OpClass::O))
            }
            Family::AddressPanel => {
                let rows = self.screen_rows();
                let flat: BTreeSet<usize> = units.iter().filter_map(|&u| self.panel.indicator_frame.cell_of(u)).collect();
                for (r, cells) in rows.into_iter().enumerate() {
                    if cells.iter().any(|c| flat.contains(c)) {
                        self.check(CheckTarget::Row { row: format!("row-{}", r + 1) }, cells, OpClass::K, None, None)?;
                    }
                }
                Ok(())
            }
            _ => {
                let mut seen = BTreeSet::new();
                let rows: Vec<usize> = units
                    .iter()
                    .filter_map(|&u| self.rows.row_of(u))
                    .filter(|r| seen.insert(*r))
                    .collect();
                self.scan_rows(&rows, OpClass::K)
            }
        }
    }
}

/// Runs a scenario against a fresh panel bound to `plant`.
pub fn run_scenario(
    spec: &PanelSpec,
    plant: &PlantState,
    scenario: &Scenario,
    params: &TimeModelParams,
) -> Result<SessionLog, OperatorError> {
    params.validate().map_err(OperatorError::InvalidParams)?;
    validate_scenario(spec, plant, scenario)?;
    let panel = PanelState::power_on(spec.clone(), plant);
    let start = plant.clock;
    let mut r = Runner {
        params,
        faults: &scenario.faults,
        plant: plant.clone(),
        panel,
        rows: spec.if_rows(plant),
        entries: Vec::new(),
        events: Vec::new(),
        busy: 0.0,
        step: 0,
    };
    for (i, step) in scenario.steps.iter().enumerate() {
        r.step = i;
        match *step {
            Step::VerifyUnit { unit, expected } => r.verify(unit, expected)?,
            Step::SetUnit { unit, desired } => r.set(unit, desired)?,
            Step::AwaitProgramLabel { program, entry } => r.await_label(program, entry)?,
            Step::FullStatusSweep => r.sweep()?,
            Step::Wait { seconds } => r.advance(seconds)?,
        }
    }
    Ok(SessionLog {
        totals: ClassTotals::from_entries(&r.entries),
        total_time: r.plant.clock - start,
        busy_time: r.busy,
        entries: r.entries,
        program_events: r.events,
        final_plant: r.plant,
    })
}
