use serde::{Deserialize, Serialize};

use super::error::SynthesisError;
use crate::panel::spec::digits_for;
use crate::panel::PanelSpec;

/// Two-stage address selection: pick a screen, then a cell on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddressPlan {
    pub rows: usize,
    pub cols: usize,
    pub screens: usize,
    /// Keys per keypad.
    pub keypad: usize,
    /// 1 for a shared numeric keypad, 2 for row and column keypads along
    /// perpendicular edges of the field.
    pub keypads: usize,
    pub screen_digits: usize,
    pub cell_digits: usize,
    pub total_controls: usize,
}

impl AddressPlan {
    pub fn to_spec(&self, id: &str) -> PanelSpec {
        PanelSpec::address(id, self.rows, self.cols, self.screens, self.keypad)
    }
}

/// 3x3 screens addressed from one 9-key keypad.
pub fn synthesize_address(n_units: usize) -> Result<AddressPlan, SynthesisError> {
    synthesize_address_field(n_units, 3, 3)
}

/// Paged field of `rows`x`cols` screens. Fields with more cells than keys on
/// a single keypad get one keypad per axis.
pub fn synthesize_address_field(
    n_units: usize,
    rows: usize,
    cols: usize,
) -> Result<AddressPlan, SynthesisError> {
    if n_units == 0 || rows == 0 || cols == 0 {
        return Err(SynthesisError::InvalidInput(
            "unit count and screen size must be at least 1".into(),
        ));
    }
    let cells = rows * cols;
    let (keypad, keypads, cell_digits) = if cells <= 9 {
        (9, 1, 1)
    } else {
        (rows.max(cols), 2, 2)
    };
    let screens = n_units.div_ceil(cells);
    let screen_digits = digits_for(screens, keypad);
    Ok(AddressPlan {
        rows,
        cols,
        screens,
        keypad,
        keypads,
        screen_digits,
        cell_digits,
        total_controls: keypad * keypads + 2,
    })
}
