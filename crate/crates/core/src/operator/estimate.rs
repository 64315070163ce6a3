use std::collections::BTreeSet;

use super::engine::{address_digits, entry_for, hierarchy_digits};
use super::error::OperatorError;
use super::scenario::Step;
use super::time_model::{TaskProfile, TimeModelParams};
use crate::panel::sequential::{encode_sequential, CommandCatalog};
use crate::panel::spec::Geometry;
use crate::panel::{CommandEmission, Family, PanelSpec, PlantState, Switch, UnitRef};

fn bad(message: String) -> OperatorError {
    OperatorError::InvalidStep { step: 0, message }
}

fn code_len(plant: &PlantState, unit: UnitRef, desired: Switch) -> Result<usize, OperatorError> {
    let catalog = CommandCatalog::from_plant(plant);
    encode_sequential(&CommandEmission::operator(unit, desired), &catalog)
        .map(|c| c.len())
        .map_err(|e| bad(e.to_string()))
}

fn flat(plant: &PlantState, unit: UnitRef) -> Result<usize, OperatorError> {
    plant.flat_index(unit).ok_or_else(|| bad(format!("unknown unit {unit}")))
}

fn screens(spec: &PanelSpec) -> (usize, usize, usize) {
    match spec.geometry {
        Geometry::Screens {
            rows, cols, screens, ..
        } => (rows, cols, screens),
        _ => (0, 0, 0),
    }
}

/// Effort of one task from a freshly powered panel: presses, checks and the
/// choice made before each of them. Idle waiting is not effort.
pub fn task_profile(spec: &PanelSpec, plant: &PlantState, task: &Step) -> Result<TaskProfile, OperatorError> {
    let mut p = TaskProfile::default();
    let (s, b) = spec.matrix().unwrap_or((0, 0));
    match (*task, spec.family) {
        (Step::Wait { .. }, _) => {}
        (Step::VerifyUnit { unit, expected }, family) => match family {
            Family::SingleChannel => {
                p.presses += code_len(plant, unit, expected)?;
                p.check(None);
            }
            Family::MultiChannel | Family::MatrixExpanded | Family::Hierarchical => {
                p.check(Some(spec.indicator_count()));
            }
            Family::MatrixMatrix => {
                p.press(Some(s));
                p.check(Some(spec.command_pairs()));
            }
            Family::ProgramPanel => {
                entry_for(plant, unit, None).ok_or_else(|| bad(format!("{unit} is in no program")))?;
                p.press(Some(s));
                p.check(Some(b));
            }
            Family::AddressPanel => {
                if spec.screen_digits() == 0 {
                    p.check(Some(spec.indicator_count()));
                } else {
                    for (_, alt) in address_digits(spec, flat(plant, unit)?) {
                        p.press(Some(alt));
                    }
                    p.check(None);
                }
            }
        },
        (Step::SetUnit { unit, desired }, family) => {
            let guard = if spec.safety_guarded.contains(&unit) { 2 } else { 0 };
            p.presses += guard;
            match family {
                Family::SingleChannel => {
                    p.presses += code_len(plant, unit, desired)?;
                }
                Family::MultiChannel => {
                    p.press(Some(spec.control_count()));
                    p.selections.push(1);
                }
                Family::MatrixExpanded | Family::MatrixMatrix => {
                    p.press(Some(s));
                    p.press(Some(b));
                    p.selections.push(2);
                }
                Family::ProgramPanel => {
                    entry_for(plant, unit, Some(desired))
                        .ok_or_else(|| bad(format!("{unit} {desired} is in no program")))?;
                    p.press(Some(s));
                    p.press(Some(b));
                    p.selections.push(2);
                }
                Family::Hierarchical => {
                    let branching = spec.branching();
                    let digits = hierarchy_digits(branching, flat(plant, unit)?);
                    for &bi in branching.iter().take(digits.len()) {
                        p.press(Some(bi));
                    }
                    p.press(None);
                    p.selections.push(branching.len());
                }
                Family::AddressPanel => {
                    let digits = address_digits(spec, flat(plant, unit)?);
                    p.selections.push(digits.len());
                    for (_, alt) in digits {
                        p.press(Some(alt));
                    }
                    p.press(None);
                }
            }
            p.check(None);
        }
        (Step::FullStatusSweep, family) => match family {
            Family::SingleChannel | Family::ProgramPanel => {
                return Err(OperatorError::Unsupported {
                    step: 0,
                    family,
                    what: "a full status sweep",
                })
            }
            Family::MatrixMatrix => {
                p.presses += s;
                p.checks += s;
            }
            Family::AddressPanel if spec.screen_digits() > 0 => {
                let (_, _, n) = screens(spec);
                let keyed = spec.screen_digits() + spec.cell_digits();
                p.presses += n * keyed;
                p.checks += n;
            }
            Family::AddressPanel => p.checks += screens(spec).0,
            _ => p.checks += spec.if_rows(plant).rows.len(),
        },
        (Step::AwaitProgramLabel { program, entry }, family) => {
            let prog = plant
                .program(program)
                .ok_or_else(|| bad(format!("unknown program {program}")))?;
            let units: Vec<UnitRef> = prog.step_of(entry).iter().map(|&e| prog.entries[e].target).collect();
            match family {
                Family::SingleChannel => {
                    return Err(OperatorError::Unsupported {
                        step: 0,
                        family,
                        what: "monitoring a program step",
                    })
                }
                Family::MatrixMatrix => {
                    p.presses += s;
                    p.checks += s;
                }
                Family::ProgramPanel => {
                    if prog.start_time.is_none() && prog.scheduled_start.is_none() {
                        p.press(Some(s));
                    } else {
                        p.presses += 1;
                    }
                    p.checks += 1;
                }
                Family::AddressPanel if spec.screen_digits() > 0 => {
                    let (rows, cols, _) = screens(spec);
                    let per = rows * cols;
                    let visited: BTreeSet<usize> =
                        units.iter().filter_map(|&u| plant.flat_index(u)).map(|f| f / per).collect();
                    let keyed = spec.screen_digits() + spec.cell_digits();
                    p.presses += visited.len() * keyed;
                    p.checks += visited.len();
                }
                Family::AddressPanel => {
                    let (_, cols, _) = screens(spec);
                    let rows: BTreeSet<usize> =
                        units.iter().filter_map(|&u| plant.flat_index(u)).map(|f| f / cols).collect();
                    p.checks += rows.len();
                }
                _ => {
                    let layout = spec.if_rows(plant);
                    let rows: BTreeSet<usize> = units.iter().filter_map(|&u| layout.row_of(u)).collect();
                    p.checks += rows.len();
                }
            }
        }
    }
    Ok(p)
}

/// Closed-form time of one task on a freshly powered panel.
pub fn estimate_time(
    spec: &PanelSpec,
    plant: &PlantState,
    task: &Step,
    params: &TimeModelParams,
) -> Result<f64, OperatorError> {
    params.validate().map_err(OperatorError::InvalidParams)?;
    Ok(task_profile(spec, plant, task)?.time(params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hierarchy_set_three_by_three() {
        let spec = PanelSpec::hierarchical("h", vec![3, 3]);
        let plant = PlantState::uniform("p", 1, 9);
        let t = estimate_time(
            &spec,
            &plant,
            &Step::SetUnit {
                unit: UnitRef::new(0, 4),
                desired: Switch::On,
            },
            &TimeModelParams::default(),
        )
        .unwrap();
        assert!((t - 2.55).abs() < 1e-9, "{t}");
    }

    #[test]
    fn empty_task_is_free() {
        let spec = PanelSpec::matrix_matrix("m", 2, 4);
        let plant = PlantState::uniform("p", 2, 2);
        let t = estimate_time(&spec, &plant, &Step::Wait { seconds: 0.0 }, &TimeModelParams::default()).unwrap();
        assert_eq!(t, 0.0);
    }

    #[test]
    fn expanded_verify_is_one_check_and_one_choice() {
        let spec = PanelSpec::matrix_expanded("m", 2, 4);
        let plant = PlantState::uniform("p", 2, 2);
        let params = TimeModelParams::default();
        let t = estimate_time(
            &spec,
            &plant,
            &Step::VerifyUnit {
                unit: UnitRef::new(1, 1),
                expected: Switch::Off,
            },
            &params,
        )
        .unwrap();
        assert!((t - (0.5 + params.decide(4))).abs() < 1e-12);
    }
}
