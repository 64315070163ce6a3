use serde::{Deserialize, Serialize};

use super::error::SynthesisError;
use crate::panel::PanelSpec;

/// Select-by-command button matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixGeometry {
    /// System-select buttons.
    pub s: usize,
    /// Command buttons (on/off pairs for two-state units).
    pub b: usize,
    pub two_state: bool,
    pub capacity: usize,
    pub total_controls: usize,
}

impl MatrixGeometry {
    pub fn new(s: usize, b: usize, two_state: bool) -> Self {
        let per_select = if two_state { b / 2 } else { b };
        Self {
            s,
            b,
            two_state,
            capacity: s * per_select,
            total_controls: s + b,
        }
    }

    pub fn units_per_select(&self) -> usize {
        if self.two_state {
            self.b / 2
        } else {
            self.b
        }
    }

    pub fn to_matrix_matrix(&self, id: &str) -> PanelSpec {
        let mut spec = PanelSpec::matrix_matrix(id, self.s, self.b);
        spec.two_state = self.two_state;
        spec
    }

    pub fn to_matrix_expanded(&self, id: &str) -> PanelSpec {
        let mut spec = PanelSpec::matrix_expanded(id, self.s, self.b);
        spec.two_state = self.two_state;
        spec
    }
}

fn smallest_b(n: usize, s: usize, two_state: bool) -> usize {
    let per = n.div_ceil(s);
    if two_state {
        2 * per
    } else {
        per
    }
}

/// Geometry with the fewest controls able to address `n_units`. Among
/// minimal geometries the most square one wins, then the one with fewer
/// select buttons.
pub fn synthesize_matrix(n_units: usize, two_state: bool) -> Result<MatrixGeometry, SynthesisError> {
    if n_units == 0 {
        return Err(SynthesisError::InvalidInput("unit count must be at least 1".into()));
    }
    let best = (1..=n_units)
        .map(|s| MatrixGeometry::new(s, smallest_b(n_units, s, two_state), two_state))
        .min_by_key(|g| (g.total_controls, g.s.abs_diff(g.b), g.s))
        .expect("non-empty range");
    Ok(best)
}

/// Smallest command field for a fixed number of select buttons.
pub fn synthesize_matrix_with_select(
    n_units: usize,
    s: usize,
    two_state: bool,
) -> Result<MatrixGeometry, SynthesisError> {
    if n_units == 0 || s == 0 {
        return Err(SynthesisError::InvalidInput(
            "unit count and select buttons must be at least 1".into(),
        ));
    }
    Ok(MatrixGeometry::new(s, smallest_b(n_units, s, two_state), two_state))
}
