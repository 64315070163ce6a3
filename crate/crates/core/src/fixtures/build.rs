//! Builders for every shipped fixture. The JSON files under `fixtures/` are
//! generated from these by the `gen_fixtures` example and must not drift.

use crate::io::documents::{LintCase, SessionInputs, SessionRecord};
use crate::io::replay::record_session;
use crate::operator::{Scenario, Step, TimeModelParams};
use crate::panel::{Layout, LayoutRow, PanelSpec, PlantState, ProgramEntry, ProgramSchedule, Switch, UnitRef};
use crate::synthesis::Function;

fn u(system: usize, unit: usize) -> UnitRef {
    UnitRef::new(system, unit)
}

/// 16 systems of 12 two-state units.
pub fn soyuz_7k() -> PlantState {
    let mut p = PlantState::uniform("soyuz-7k", 16, 12);
    p.display_name = "Soyuz 7K onboard systems".to_string();
    p
}

/// Program step `i` of P0 switches on unit `i` of systems `3i..3i+9`.
pub fn auto_step_units(step: usize) -> Vec<UnitRef> {
    (0..9).map(|k| u(3 * step + k, step)).collect()
}

pub const AUTO_LABELS: [f64; 3] = [120.0, 240.0, 360.0];

/// `soyuz-7k` plus program P0, started by the sequencer at t = 0, with
/// three labels of nine commands each.
pub fn soyuz_7k_auto() -> PlantState {
    let mut p = soyuz_7k();
    p.id = "soyuz-7k-auto".to_string();
    p.display_name = "Soyuz 7K onboard systems, automatic program P0".to_string();
    let entries = AUTO_LABELS
        .iter()
        .enumerate()
        .flat_map(|(i, &at)| {
            auto_step_units(i).into_iter().map(move |target| ProgramEntry {
                issue_offset: at,
                target,
                desired: Switch::On,
                deadline_offset: at + 30.0,
            })
        })
        .collect();
    p.programs
        .push(ProgramSchedule::new(0, "P0", entries).with_scheduled_start(0.0));
    p
}

/// 9 systems of 9 units.
pub fn std_81() -> PlantState {
    let mut p = PlantState::uniform("std-81", 9, 9);
    p.display_name = "Standard 81-unit plant".to_string();
    p
}

fn named(mut spec: PanelSpec, display: &str) -> PanelSpec {
    spec.display_name = display.to_string();
    spec
}

/// Right-hand command-signaling device: 16 system selectors, 12 on/off
/// pairs, one indicator row.
pub fn csd_r() -> PanelSpec {
    let mut s = named(PanelSpec::matrix_matrix("csd-r", 16, 24), "CSDr");
    s.dark_screen_capable = true;
    s.change_signaling_capable = true;
    s
}

pub fn csd_l() -> PanelSpec {
    let mut s = named(PanelSpec::matrix_matrix("csd-l", 16, 24), "CSDl");
    s.dark_screen_capable = true;
    s.change_signaling_capable = true;
    s
}

/// Right-hand device with the last pair of every system behind the
/// safety guard.
pub fn csd_g() -> PanelSpec {
    let mut s = csd_r();
    s.id = "csd-g".to_string();
    s.display_name = "CSDr guarded".to_string();
    s.safety_guarded = (0..16).map(|sys| UnitRef::new(sys, 11)).collect();
    s
}

/// Command-signaling field: matrix commands, all 192 indicators visible.
pub fn csf_16() -> PanelSpec {
    let mut s = named(PanelSpec::matrix_expanded("csf-16", 16, 24), "CSF");
    s.change_signaling_capable = true;
    s
}

/// Conventional panel, one lamp and one switch pair per unit. Rows are
/// functional: each program step of P0 has its own row, the remaining units
/// are grouped by system.
pub fn conv_192() -> PanelSpec {
    let plant = soyuz_7k();
    let mut rows: Vec<LayoutRow> = (0..AUTO_LABELS.len())
        .map(|i| LayoutRow {
            id: format!("P0-{}", i + 1),
            units: auto_step_units(i),
        })
        .collect();
    let programmed: Vec<UnitRef> = (0..AUTO_LABELS.len()).flat_map(auto_step_units).collect();
    for (s, sys) in plant.systems.iter().enumerate() {
        rows.push(LayoutRow {
            id: sys.name.clone(),
            units: (0..sys.units.len())
                .map(|i| u(s, i))
                .filter(|x| !programmed.contains(x))
                .collect(),
        });
    }
    let mut s = named(PanelSpec::multi_channel("conv-192", 192), "Conventional 192");
    s.layout = Some(Layout { rows });
    s
}

pub fn mm_81() -> PanelSpec {
    named(PanelSpec::matrix_matrix("mm-81", 9, 18), "Matrix-matrix 9x9")
}

pub fn me_81() -> PanelSpec {
    named(PanelSpec::matrix_expanded("me-81", 9, 18), "Matrix 9x9, expanded field")
}

pub fn mc_81() -> PanelSpec {
    named(PanelSpec::multi_channel("mc-81", 81), "Conventional 81")
}

/// Nine 3x3 screens, one per system, addressed from a 9-key keypad.
pub fn addr_81() -> PanelSpec {
    named(PanelSpec::address("addr-81", 3, 3, 9, 9), "Address 9x(3x3)")
}

pub fn hier_81() -> PanelSpec {
    named(PanelSpec::hierarchical("hier-81", vec![3, 3, 3, 3]), "Hierarchical 3-3-3-3")
}

pub fn single_81() -> PanelSpec {
    named(PanelSpec::single_channel("single-81"), "Single channel")
}

/// Program panel for P0: one program selector, 27 entry buttons.
pub fn prog_p0() -> PanelSpec {
    named(PanelSpec::program_panel("prog-p0", 1, 27), "Program panel P0")
}

/// Alternating checks and commands across all 16 systems, each on a system
/// other than the previous step's, plus two checks on the system just
/// commanded.
pub fn checking_run() -> Scenario {
    let mut steps = Vec::new();
    for s in 0..16 {
        if s % 2 == 0 {
            steps.push(Step::VerifyUnit {
                unit: u(s, 0),
                expected: Switch::Off,
            });
        } else {
            steps.push(Step::SetUnit {
                unit: u(s, 0),
                desired: Switch::On,
            });
            if s == 5 || s == 11 {
                steps.push(Step::VerifyUnit {
                    unit: u(s, 0),
                    expected: Switch::On,
                });
            }
        }
    }
    let mut sc = Scenario::new("checking-run", steps);
    sc.description = "Calibrated checking run: 8 checks and 8 commands alternating over all \
                      systems, plus 2 repeated checks on the system just commanded."
        .to_string();
    sc
}

/// After each P0 label the operator monitors the label's commands, checks
/// further units (9, 9 and 8 of them, each on a new system) and issues one
/// command of their own.
pub fn auto_mode_16() -> Scenario {
    let mut steps = Vec::new();
    for (i, checks) in [9usize, 9, 8].into_iter().enumerate() {
        steps.push(Step::AwaitProgramLabel {
            program: 0,
            entry: 9 * i,
        });
        for s in 0..checks {
            steps.push(Step::VerifyUnit {
                unit: u(s, 11),
                expected: Switch::Off,
            });
        }
        steps.push(Step::SetUnit {
            unit: u(9 + i, 10),
            desired: Switch::On,
        });
    }
    let mut sc = Scenario::new("auto-mode-16", steps);
    sc.description = "Calibrated automatic-mode run: three labels of program P0, each followed \
                      by unit checks on new systems and one manual command."
        .to_string();
    sc
}

/// One command per system of `std-81`, each a cold task.
pub fn std_tasks() -> Scenario {
    let steps = (0..9)
        .map(|s| Step::SetUnit {
            unit: u(s, (s * 4) % 9),
            desired: Switch::On,
        })
        .collect();
    let mut sc = Scenario::new("std-tasks", steps);
    sc.description = "Standard task suite: issue and confirm one command in every system.".to_string();
    sc
}

pub fn plants() -> Vec<PlantState> {
    vec![soyuz_7k(), soyuz_7k_auto(), std_81()]
}

pub fn panels() -> Vec<PanelSpec> {
    vec![
        csd_r(),
        csd_l(),
        csd_g(),
        csf_16(),
        conv_192(),
        mm_81(),
        me_81(),
        mc_81(),
        addr_81(),
        hier_81(),
        single_81(),
        prog_p0(),
    ]
}

pub fn scenarios() -> Vec<Scenario> {
    vec![checking_run(), auto_mode_16(), std_tasks()]
}

/// (panel, plant, scenario) triples saved as session logs.
pub const SESSION_RUNS: [(&str, &str, &str); 9] = [
    ("csd-r", "soyuz-7k", "checking-run"),
    ("csf-16", "soyuz-7k", "checking-run"),
    ("conv-192", "soyuz-7k", "checking-run"),
    ("csd-r", "soyuz-7k-auto", "auto-mode-16"),
    ("csf-16", "soyuz-7k-auto", "auto-mode-16"),
    ("conv-192", "soyuz-7k-auto", "auto-mode-16"),
    ("mm-81", "std-81", "std-tasks"),
    ("me-81", "std-81", "std-tasks"),
    ("addr-81", "std-81", "std-tasks"),
];

pub fn session_name(run: (&str, &str, &str)) -> String {
    format!("{}--{}", run.2, run.0)
}

pub fn sessions() -> Vec<(String, SessionRecord)> {
    SESSION_RUNS
        .iter()
        .map(|&run| {
            let (panel, plant, scenario) = run;
            let inputs = SessionInputs {
                spec: panels().into_iter().find(|p| p.id == panel).expect("known panel"),
                plant: plants().into_iter().find(|p| p.id == plant).expect("known plant"),
                scenario: scenarios()
                    .into_iter()
                    .find(|s| s.id == scenario)
                    .expect("known scenario"),
                params: TimeModelParams::default(),
            };
            let record = record_session(inputs).expect("shipped sessions run");
            (session_name(run), record)
        })
        .collect()
}

fn row(id: &str, units: &[(usize, usize)]) -> LayoutRow {
    LayoutRow {
        id: id.to_string(),
        units: units.iter().map(|&(s, x)| u(s, x)).collect(),
    }
}

fn func(id: &str, units: &[(usize, usize)], control_row: &str) -> Function {
    Function {
        id: id.to_string(),
        units: units.iter().map(|&(s, x)| u(s, x)).collect(),
        control_row: control_row.to_string(),
    }
}

fn system_rows(plant: &PlantState) -> Vec<LayoutRow> {
    Layout::by_system(plant).rows
}

fn ragged(id: &str, sizes: &[usize]) -> PlantState {
    let mut p = PlantState::uniform(id, sizes.len(), sizes.iter().copied().max().unwrap_or(0));
    for (sys, &n) in p.systems.iter_mut().zip(sizes) {
        sys.units.truncate(n);
    }
    p
}

fn case(
    id: &str,
    description: &str,
    plant: PlantState,
    rows: Vec<LayoutRow>,
    functions: Vec<Function>,
    expected: usize,
) -> LintCase {
    LintCase {
        id: id.to_string(),
        description: description.to_string(),
        plant,
        layout: Layout { rows },
        functions,
        expected_violations: expected,
    }
}

/// Ten compliant layouts and ten with exactly one defect each.
pub fn lint_cases() -> Vec<LintCase> {
    let p43 = || PlantState::uniform("lint-4x3", 4, 3);
    let p62 = || PlantState::uniform("lint-6x2", 6, 2);
    let pr = || ragged("lint-ragged", &[1, 2, 5]);
    let mut out = Vec::new();

    out.push(case("clean-01", "one row per system", p43(), system_rows(&p43()), vec![], 0));
    out.push(case(
        "clean-02",
        "function inside its own system row",
        p43(),
        system_rows(&p43()),
        vec![func("F1", &[(0, 0), (0, 2)], "A")],
        0,
    ));
    let mut rows = system_rows(&p43());
    rows.push(row("F", &[(0, 0), (1, 0)]));
    out.push(case(
        "clean-03",
        "cross-system function with its own row duplicating units",
        p43(),
        rows,
        vec![func("F1", &[(0, 0), (1, 0)], "F")],
        0,
    ));
    let mut rows = system_rows(&p43());
    rows.push(row("F1", &[(0, 0), (1, 1)]));
    rows.push(row("F2", &[(2, 0), (1, 1)]));
    out.push(case(
        "clean-04",
        "shared unit duplicated in both function rows",
        p43(),
        rows,
        vec![func("F1", &[(0, 0), (1, 1)], "F1"), func("F2", &[(2, 0), (1, 1)], "F2")],
        0,
    ));
    let p1 = PlantState::uniform("lint-1x4", 1, 4);
    out.push(case("clean-05", "single system", p1.clone(), system_rows(&p1), vec![], 0));
    let mut rows = system_rows(&p43());
    rows[0].units.push(u(1, 0));
    out.push(case("clean-06", "extra duplicate of another system's unit", p43(), rows, vec![], 0));
    let functions = (0..6)
        .map(|s| func(&format!("F{s}"), &[(s, 0), (s, 1)], &((b'A' + s as u8) as char).to_string()))
        .collect();
    out.push(case("clean-07", "one function per system", p62(), system_rows(&p62()), functions, 0));
    out.push(case("clean-08", "uneven systems", pr(), system_rows(&pr()), vec![], 0));
    out.push(case(
        "clean-09",
        "two whole systems share one row",
        p43(),
        vec![
            row("AB", &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]),
            row("C", &[(2, 0), (2, 1), (2, 2)]),
            row("D", &[(3, 0), (3, 1), (3, 2)]),
        ],
        vec![],
        0,
    ));
    out.push(case(
        "clean-10",
        "function spanning a merged row",
        p43(),
        vec![
            row("AB", &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]),
            row("CD", &[(2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (3, 2)]),
        ],
        vec![func("F1", &[(0, 1), (1, 2)], "AB")],
        0,
    ));

    out.push(case(
        "defect-01",
        "system A split over rows A and B",
        p43(),
        vec![
            row("A", &[(0, 0), (0, 1)]),
            row("B", &[(0, 2), (1, 0), (1, 1), (1, 2)]),
            row("C", &[(2, 0), (2, 1), (2, 2)]),
            row("D", &[(3, 0), (3, 1), (3, 2)]),
        ],
        vec![],
        1,
    ));
    out.push(case(
        "defect-02",
        "function unit from system B missing in control row A",
        p43(),
        system_rows(&p43()),
        vec![func("F1", &[(0, 0), (1, 0)], "A")],
        1,
    ));
    let mut rows = system_rows(&p43());
    rows.push(row("F1", &[(0, 0), (1, 1)]));
    rows.push(row("F2", &[(2, 0)]));
    out.push(case(
        "defect-03",
        "shared unit B2 not duplicated in row F2",
        p43(),
        rows,
        vec![func("F1", &[(0, 0), (1, 1)], "F1"), func("F2", &[(2, 0), (1, 1)], "F2")],
        1,
    ));
    out.push(case(
        "defect-04",
        "system C spread over three rows",
        p43(),
        vec![
            row("A", &[(0, 0), (0, 1), (0, 2), (2, 0)]),
            row("B", &[(1, 0), (1, 1), (1, 2), (2, 1)]),
            row("C", &[(2, 2)]),
            row("D", &[(3, 0), (3, 1), (3, 2)]),
        ],
        vec![],
        1,
    ));
    let mut rows = system_rows(&p43());
    rows.push(row("F", &[(0, 0), (1, 0)]));
    out.push(case(
        "defect-05",
        "function row lacks one of three units",
        p43(),
        rows,
        vec![func("F1", &[(0, 0), (1, 0), (2, 0)], "F")],
        1,
    ));
    out.push(case(
        "defect-06",
        "merged row plus a split system C",
        p43(),
        vec![
            row("AB", &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0)]),
            row("C", &[(2, 1), (2, 2)]),
            row("D", &[(3, 0), (3, 1), (3, 2)]),
        ],
        vec![],
        1,
    ));
    let mut rows = system_rows(&p62());
    let moved = rows[5].units.pop().expect("two units");
    rows[4].units.push(moved);
    out.push(case("defect-07", "last unit of system F shown only in row E", p62(), rows, vec![], 1));
    out.push(case(
        "defect-08",
        "function controlled from row C uses a unit of system D",
        p43(),
        system_rows(&p43()),
        vec![func("F1", &[(2, 0), (2, 1)], "C"), func("F2", &[(2, 2), (3, 1)], "C")],
        1,
    ));
    let mut rows = system_rows(&p62());
    rows.push(row("F1", &[(0, 0), (3, 1)]));
    rows.push(row("F2", &[(1, 0), (3, 1)]));
    rows.push(row("F3", &[(2, 0)]));
    out.push(case(
        "defect-09",
        "unit shared by three functions missing in one of their rows",
        p62(),
        rows,
        vec![
            func("F1", &[(0, 0), (3, 1)], "F1"),
            func("F2", &[(1, 0), (3, 1)], "F2"),
            func("F3", &[(2, 0), (3, 1)], "F3"),
        ],
        1,
    ));
    out.push(case(
        "defect-10",
        "uneven plant with the large system split",
        pr(),
        vec![
            row("A", &[(0, 0)]),
            row("B", &[(1, 0), (1, 1), (2, 4)]),
            row("C", &[(2, 0), (2, 1), (2, 2), (2, 3)]),
        ],
        vec![],
        1,
    ));
    out
}
