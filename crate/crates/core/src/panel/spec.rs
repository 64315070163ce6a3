use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::error::PanelError;
use super::plant::PlantState;
use super::types::UnitRef;

/// Panel families on the compression scale, from one lamp and one button to
/// one lamp and one control pair per unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// One button, one lamp; commands keyed as a pulse code.
    SingleChannel,
    /// Conventional panel: dedicated control pair and lamp per unit.
    MultiChannel,
    /// Matrix command issuing with an expanded information field (CSF type).
    MatrixExpanded,
    /// Matrix command issuing and matrix selection of the displayed system
    /// (CSD type): one indicator row showing the selected system.
    MatrixMatrix,
    /// Latching program selectors plus per-entry command buttons with LEDs,
    /// without a name decoder.
    ProgramPanel,
    /// Multi-stage keypad selection with an expanded, spatially separate
    /// information field.
    Hierarchical,
    /// Screen-then-cell address selection on a paged screen.
    AddressPanel,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::SingleChannel,
        Family::MultiChannel,
        Family::MatrixExpanded,
        Family::MatrixMatrix,
        Family::ProgramPanel,
        Family::Hierarchical,
        Family::AddressPanel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::SingleChannel => "single_channel",
            Family::MultiChannel => "multi_channel",
            Family::MatrixExpanded => "matrix_expanded",
            Family::MatrixMatrix => "matrix_matrix",
            Family::ProgramPanel => "program_panel",
            Family::Hierarchical => "hierarchical",
            Family::AddressPanel => "address_panel",
        }
    }

    /// Families whose information field shows every unit at once.
    pub fn expanded_if(self) -> bool {
        matches!(
            self,
            Family::MultiChannel | Family::MatrixExpanded | Family::Hierarchical
        )
    }

    pub fn has_selectors(self) -> bool {
        matches!(
            self,
            Family::MatrixExpanded | Family::MatrixMatrix | Family::ProgramPanel
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    Single,
    Channels {
        count: usize,
    },
    Matrix {
        select_buttons: usize,
        command_buttons: usize,
    },
    Stages {
        branching: Vec<usize>,
    },
    Screens {
        rows: usize,
        cols: usize,
        screens: usize,
        keypad: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutRow {
    pub id: String,
    pub units: Vec<UnitRef>,
}

/// Information-field row assignment. A unit may appear in several rows.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layout {
    pub rows: Vec<LayoutRow>,
}

impl Layout {
    /// One row per system, in system order.
    pub fn by_system(plant: &PlantState) -> Self {
        Self {
            rows: plant
                .systems
                .iter()
                .enumerate()
                .map(|(s, sys)| LayoutRow {
                    id: sys.name.clone(),
                    units: (0..sys.units.len()).map(|u| UnitRef::new(s, u)).collect(),
                })
                .collect(),
        }
    }

    /// Index of the first row displaying `unit`.
    pub fn row_of(&self, unit: UnitRef) -> Option<usize> {
        self.rows.iter().position(|r| r.units.contains(&unit))
    }
}

/// Geometry plus behavioral family of one panel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelSpec {
    pub id: String,
    pub display_name: String,
    pub family: Family,
    pub geometry: Geometry,
    pub two_state: bool,
    #[serde(default)]
    pub layout: Option<Layout>,
    #[serde(default)]
    pub dark_screen_capable: bool,
    #[serde(default)]
    pub change_signaling_capable: bool,
    #[serde(default)]
    pub safety_guarded: BTreeSet<UnitRef>,
}

impl PanelSpec {
    pub fn new(id: &str, family: Family, geometry: Geometry) -> Self {
        Self {
            id: id.to_string(),
            display_name: id.to_string(),
            family,
            geometry,
            two_state: true,
            layout: None,
            dark_screen_capable: false,
            change_signaling_capable: false,
            safety_guarded: BTreeSet::new(),
        }
    }

    pub fn single_channel(id: &str) -> Self {
        Self::new(id, Family::SingleChannel, Geometry::Single)
    }

    pub fn multi_channel(id: &str, count: usize) -> Self {
        Self::new(id, Family::MultiChannel, Geometry::Channels { count })
    }

    pub fn matrix_expanded(id: &str, select_buttons: usize, command_buttons: usize) -> Self {
        Self::new(
            id,
            Family::MatrixExpanded,
            Geometry::Matrix {
                select_buttons,
                command_buttons,
            },
        )
    }

    pub fn matrix_matrix(id: &str, select_buttons: usize, command_buttons: usize) -> Self {
        Self::new(
            id,
            Family::MatrixMatrix,
            Geometry::Matrix {
                select_buttons,
                command_buttons,
            },
        )
    }

    pub fn program_panel(id: &str, programs: usize, entry_buttons: usize) -> Self {
        Self::new(
            id,
            Family::ProgramPanel,
            Geometry::Matrix {
                select_buttons: programs,
                command_buttons: entry_buttons,
            },
        )
    }

    pub fn hierarchical(id: &str, branching: Vec<usize>) -> Self {
        Self::new(id, Family::Hierarchical, Geometry::Stages { branching })
    }

    pub fn address(id: &str, rows: usize, cols: usize, screens: usize, keypad: usize) -> Self {
        Self::new(
            id,
            Family::AddressPanel,
            Geometry::Screens {
                rows,
                cols,
                screens,
                keypad,
            },
        )
    }

    /// `(select_buttons, command_buttons)` for matrix-geometry families.
    pub fn matrix(&self) -> Option<(usize, usize)> {
        match self.geometry {
            Geometry::Matrix {
                select_buttons,
                command_buttons,
            } => Some((select_buttons, command_buttons)),
            _ => None,
        }
    }

    /// Number of addressable units per selected system on matrix panels.
    pub fn command_pairs(&self) -> usize {
        match self.geometry {
            Geometry::Matrix {
                command_buttons, ..
            } if self.family != Family::ProgramPanel => {
                if self.two_state {
                    command_buttons / 2
                } else {
                    command_buttons
                }
            }
            Geometry::Matrix {
                command_buttons, ..
            } => command_buttons,
            _ => 0,
        }
    }

    pub fn branching(&self) -> &[usize] {
        match &self.geometry {
            Geometry::Stages { branching } => branching,
            _ => &[],
        }
    }

    /// Number of cells in the indicator frame.
    pub fn indicator_count(&self) -> usize {
        match (&self.family, &self.geometry) {
            (_, Geometry::Single) => 1,
            (_, Geometry::Channels { count }) => *count,
            (Family::MatrixExpanded, Geometry::Matrix { select_buttons, .. }) => {
                select_buttons * self.command_pairs()
            }
            (Family::ProgramPanel, Geometry::Matrix { select_buttons, command_buttons }) => {
                select_buttons + command_buttons
            }
            (_, Geometry::Matrix { .. }) => self.command_pairs(),
            (_, Geometry::Stages { branching }) => branching.iter().product(),
            (_, Geometry::Screens { rows, cols, .. }) => rows * cols,
        }
    }

    /// Number of controls (buttons, keys, toggles) in the command field.
    pub fn control_count(&self) -> usize {
        match (&self.family, &self.geometry) {
            (_, Geometry::Single) => 1,
            (_, Geometry::Channels { count }) => {
                if self.two_state {
                    2 * count
                } else {
                    *count
                }
            }
            (_, Geometry::Matrix { select_buttons, command_buttons }) => {
                select_buttons + command_buttons
            }
            (_, Geometry::Stages { branching }) => branching.iter().sum::<usize>() + 2,
            (_, Geometry::Screens { keypad, .. }) => keypad + 2,
        }
    }

    /// Maximum number of units the geometry can address.
    pub fn capacity(&self) -> usize {
        match (&self.family, &self.geometry) {
            (_, Geometry::Single) => usize::MAX,
            (_, Geometry::Channels { count }) => *count,
            (_, Geometry::Matrix { select_buttons, .. }) => select_buttons * self.command_pairs(),
            (_, Geometry::Stages { branching }) => branching.iter().product(),
            (_, Geometry::Screens { rows, cols, screens, .. }) => rows * cols * screens,
        }
    }

    /// Digits needed to address a screen on an address panel.
    pub fn screen_digits(&self) -> usize {
        match self.geometry {
            Geometry::Screens { screens, keypad, .. } => digits_for(screens, keypad),
            _ => 0,
        }
    }

    /// Digits needed to address a cell within one screen.
    pub fn cell_digits(&self) -> usize {
        match self.geometry {
            Geometry::Screens { rows, cols, keypad, .. } => {
                if rows * cols <= keypad {
                    1
                } else {
                    2
                }
            }
            _ => 0,
        }
    }

    /// Structural checks independent of any plant.
    pub fn validate(&self) -> Result<(), PanelError> {
        let bad = |m: String| Err(PanelError::InvalidSpec(m));
        let kind_ok = matches!(
            (self.family, &self.geometry),
            (Family::SingleChannel, Geometry::Single)
                | (Family::MultiChannel, Geometry::Channels { .. })
                | (Family::MatrixExpanded, Geometry::Matrix { .. })
                | (Family::MatrixMatrix, Geometry::Matrix { .. })
                | (Family::ProgramPanel, Geometry::Matrix { .. })
                | (Family::Hierarchical, Geometry::Stages { .. })
                | (Family::AddressPanel, Geometry::Screens { .. })
        );
        if !kind_ok {
            return bad(format!("geometry does not match family {}", self.family));
        }
        match &self.geometry {
            Geometry::Single => {}
            Geometry::Channels { count } => {
                if *count == 0 {
                    return bad("channel count must be positive".into());
                }
            }
            Geometry::Matrix {
                select_buttons,
                command_buttons,
            } => {
                if *select_buttons == 0 || *command_buttons == 0 {
                    return bad("matrix needs at least one select and one command button".into());
                }
                if self.two_state
                    && self.family != Family::ProgramPanel
                    && command_buttons % 2 != 0
                {
                    return bad(format!(
                        "command_buttons = {command_buttons} is odd; two-state units need on/off pairs"
                    ));
                }
            }
            Geometry::Stages { branching } => {
                if let Some(b) = branching.iter().find(|&&b| b < 2) {
                    return bad(format!("branching factor {b} < 2"));
                }
                if branching.iter().any(|&b| b > u8::MAX as usize) {
                    return bad("branching factor exceeds keypad range".into());
                }
            }
            Geometry::Screens {
                rows,
                cols,
                screens,
                keypad,
            } => {
                if *rows == 0 || *cols == 0 || *screens == 0 || *keypad == 0 {
                    return bad("screen geometry must be positive".into());
                }
                if *keypad < (*rows).max(*cols) {
                    return bad(format!(
                        "keypad of {keypad} keys cannot index {rows}x{cols} screen"
                    ));
                }
                if *keypad > u8::MAX as usize {
                    return bad("keypad too large".into());
                }
                if *screens > 1 && *keypad < 2 {
                    return bad("multiple screens need at least two keys".into());
                }
            }
        }
        if let Some(layout) = &self.layout {
            let mut ids = BTreeSet::new();
            for row in &layout.rows {
                if !ids.insert(row.id.as_str()) {
                    return bad(format!("duplicate layout row id {}", row.id));
                }
            }
        }
        Ok(())
    }

    /// Checks that the geometry can address every unit of `plant`.
    pub fn check_binding(&self, plant: &PlantState) -> Result<(), PanelError> {
        self.validate()?;
        let n = plant.unit_count();
        let fail = |m: String| Err(PanelError::Binding(m));
        match self.family {
            Family::SingleChannel => {}
            Family::MultiChannel => {
                if self.capacity() < n {
                    return fail(format!("{} channels < {n} units", self.capacity()));
                }
            }
            Family::MatrixExpanded | Family::MatrixMatrix => {
                let (s, _) = self.matrix().expect("validated");
                if self.capacity() < n {
                    return fail(format!("capacity {} < {n} units", self.capacity()));
                }
                if plant.system_count() > s {
                    return fail(format!(
                        "{} systems but only {s} select buttons",
                        plant.system_count()
                    ));
                }
                if plant.max_units_per_system() > self.command_pairs() {
                    return fail(format!(
                        "a system has {} units but only {} command positions",
                        plant.max_units_per_system(),
                        self.command_pairs()
                    ));
                }
            }
            Family::ProgramPanel => {
                let (s, b) = self.matrix().expect("validated");
                if plant.programs.len() > s {
                    return fail(format!("{} programs but {s} program buttons", plant.programs.len()));
                }
                if let Some(p) = plant.programs.iter().find(|p| p.entries.len() > b) {
                    return fail(format!(
                        "program {} has {} entries but {b} entry buttons",
                        p.id,
                        p.entries.len()
                    ));
                }
            }
            Family::Hierarchical | Family::AddressPanel => {
                if self.capacity() < n {
                    return fail(format!("capacity {} < {n} units", self.capacity()));
                }
            }
        }
        for g in &self.safety_guarded {
            if !plant.contains(*g) {
                return Err(PanelError::UnknownUnit(*g));
            }
        }
        if let Some(layout) = &self.layout {
            for row in &layout.rows {
                if let Some(u) = row.units.iter().find(|u| !plant.contains(**u)) {
                    return Err(PanelError::UnknownUnit(*u));
                }
            }
        }
        Ok(())
    }

    /// Information-field rows used when scanning an expanded field: matrix
    /// panels are forced into one row per system, other expanded panels use
    /// their declared layout, falling back to one row per system.
    pub fn if_rows(&self, plant: &PlantState) -> Layout {
        match (self.family, &self.layout) {
            (Family::MatrixExpanded, _) => Layout::by_system(plant),
            (_, Some(layout)) => layout.clone(),
            (_, None) => Layout::by_system(plant),
        }
    }
}

/// Number of base-`keypad` digits needed to index `count` items (zero when
/// there is only one item).
pub fn digits_for(count: usize, keypad: usize) -> usize {
    if count <= 1 || keypad < 2 {
        return 0;
    }
    let mut digits = 0;
    let mut reach = 1usize;
    while reach < count {
        reach = reach.saturating_mul(keypad);
        digits += 1;
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soyuz_csd_capacity() {
        let spec = PanelSpec::matrix_matrix("csd", 16, 24);
        assert_eq!(spec.capacity(), 192);
        assert_eq!(spec.indicator_count(), 12);
        assert_eq!(spec.control_count(), 40);
        let plant = PlantState::uniform("soyuz", 16, 12);
        spec.check_binding(&plant).unwrap();
    }

    #[test]
    fn odd_command_buttons_rejected_for_two_state() {
        let spec = PanelSpec::matrix_expanded("x", 4, 5);
        let err = spec.validate().unwrap_err();
        assert!(err.to_string().contains("pairs"), "{err}");
    }

    #[test]
    fn binding_checks_capacity() {
        let spec = PanelSpec::matrix_matrix("csd", 16, 24);
        let plant = PlantState::uniform("big", 16, 16);
        assert!(matches!(spec.check_binding(&plant), Err(PanelError::Binding(_))));
    }

    #[test]
    fn hierarchy_factor_below_two_rejected() {
        assert!(PanelSpec::hierarchical("h", vec![3, 1]).validate().is_err());
        assert!(PanelSpec::hierarchical("h", vec![3, 3]).validate().is_ok());
    }

    #[test]
    fn keypad_must_cover_screen_index() {
        assert!(PanelSpec::address("a", 3, 3, 2, 2).validate().is_err());
        assert!(PanelSpec::address("a", 3, 3, 2, 9).validate().is_ok());
    }

    #[test]
    fn address_digit_counts() {
        let a = PanelSpec::address("a", 3, 3, 22, 9);
        assert_eq!(a.screen_digits(), 2);
        assert_eq!(a.cell_digits(), 1);
        let one = PanelSpec::address("b", 10, 10, 1, 10);
        assert_eq!(one.screen_digits(), 0);
        assert_eq!(one.cell_digits(), 2);
        assert_eq!(digits_for(9, 9), 1);
        assert_eq!(digits_for(10, 9), 2);
    }

    #[test]
    fn family_geometry_mismatch() {
        let mut spec = PanelSpec::matrix_matrix("m", 4, 4);
        spec.family = Family::Hierarchical;
        assert!(spec.validate().is_err());
    }
}
