//! Shipped fixtures, embedded at compile time.

pub mod build;

use serde::Serialize;

use crate::io::documents::{parse_document, Document, LintCase};
use crate::operator::Scenario;
use crate::panel::{PanelSpec, PlantState};

/// `(name, file text)`; the name is the file name without its extension.
pub type Embedded = &'static [(&'static str, &'static str)];

macro_rules! embed {
    ($dir:literal, $ext:literal, [$($name:literal),* $(,)?]) => {
        &[$(($name, include_str!(concat!("../../fixtures/", $dir, "/", $name, $ext)))),*]
    };
}

pub const PLANTS: Embedded = embed!(
    "plants",
    ".plant.json",
    [
        "soyuz-7k",
        "soyuz-7k-auto",
        "std-81",
    ]
);

pub const PANELS: Embedded = embed!(
    "panels",
    ".panel.json",
    [
        "addr-81",
        "conv-192",
        "csd-g",
        "csd-l",
        "csd-r",
        "csf-16",
        "hier-81",
        "mc-81",
        "me-81",
        "mm-81",
        "prog-p0",
        "single-81",
    ]
);

pub const SCENARIOS: Embedded = embed!(
    "scenarios",
    ".scn.json",
    [
        "auto-mode-16",
        "checking-run",
        "std-tasks",
    ]
);

pub const LINT: Embedded = embed!(
    "lint",
    ".lint.json",
    [
        "clean-01",
        "clean-02",
        "clean-03",
        "clean-04",
        "clean-05",
        "clean-06",
        "clean-07",
        "clean-08",
        "clean-09",
        "clean-10",
        "defect-01",
        "defect-02",
        "defect-03",
        "defect-04",
        "defect-05",
        "defect-06",
        "defect-07",
        "defect-08",
        "defect-09",
        "defect-10",
    ]
);

pub const SESSIONS: Embedded = embed!(
    "sessions",
    ".log.json",
    [
        "auto-mode-16--conv-192",
        "auto-mode-16--csd-r",
        "auto-mode-16--csf-16",
        "checking-run--conv-192",
        "checking-run--csd-r",
        "checking-run--csf-16",
        "std-tasks--addr-81",
        "std-tasks--me-81",
        "std-tasks--mm-81",
    ]
);

fn find<T: Document>(files: Embedded, name: &str) -> Option<T> {
    files
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_document(text).expect("shipped fixtures parse"))
}

fn all<T: Document>(files: Embedded) -> Vec<T> {
    files
        .iter()
        .map(|(_, text)| parse_document(text).expect("shipped fixtures parse"))
        .collect()
}

pub fn plant(id: &str) -> Option<PlantState> {
    find(PLANTS, id)
}

pub fn panel(id: &str) -> Option<PanelSpec> {
    find(PANELS, id)
}

pub fn scenario(id: &str) -> Option<Scenario> {
    find(SCENARIOS, id)
}

pub fn lint_cases() -> Vec<LintCase> {
    all(LINT)
}

pub fn session_text(name: &str) -> Option<&'static str> {
    SESSIONS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Names of every shipped fixture, by kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureIndex {
    pub plants: Vec<&'static str>,
    pub panels: Vec<&'static str>,
    pub scenarios: Vec<&'static str>,
    pub lint: Vec<&'static str>,
    pub sessions: Vec<&'static str>,
}

pub fn index() -> FixtureIndex {
    let names = |files: Embedded| files.iter().map(|(n, _)| *n).collect();
    FixtureIndex {
        plants: names(PLANTS),
        panels: names(PANELS),
        scenarios: names(SCENARIOS),
        lint: names(LINT),
        sessions: names(SESSIONS),
    }
}
