use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::address::synthesize_address;
use super::error::SynthesisError;
use super::hierarchy::synthesize_hierarchy;
use super::matrix::synthesize_matrix;
use crate::io::canonical::fixed6;
use crate::panel::{Family, Geometry, PanelSpec};

/// Signal and command compression of a panel bound to a plant, kept as exact
/// integer counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressionProfile {
    pub n_units: usize,
    pub n_commands: usize,
    pub indicators: usize,
    pub controls: usize,
    /// Units per indicator.
    #[serde(with = "fixed6")]
    pub k_sig: f64,
    /// Commands per control.
    #[serde(with = "fixed6")]
    pub k_cmd: f64,
}

impl CompressionProfile {
    fn new(n_units: usize, n_commands: usize, indicators: usize, controls: usize) -> Self {
        Self {
            n_units,
            n_commands,
            indicators,
            controls,
            k_sig: n_units as f64 / indicators as f64,
            k_cmd: n_commands as f64 / controls as f64,
        }
    }

    /// Exact comparison of `k_sig` values.
    pub fn cmp_sig(&self, other: &Self) -> Ordering {
        (self.n_units as u128 * other.indicators as u128).cmp(&(other.n_units as u128 * self.indicators as u128))
    }

    pub fn cmp_cmd(&self, other: &Self) -> Ordering {
        (self.n_commands as u128 * other.controls as u128)
            .cmp(&(other.n_commands as u128 * self.controls as u128))
    }
}

/// Indicators wired to units and controls on the panel. Panels whose field
/// has more positions than units count only the positions in use.
pub fn compression_profile(
    spec: &PanelSpec,
    n_units: usize,
    n_commands: usize,
) -> Result<CompressionProfile, SynthesisError> {
    spec.validate()?;
    if n_units == 0 {
        return Err(SynthesisError::InvalidInput("unit count must be at least 1".into()));
    }
    let (indicators, controls) = match (&spec.family, &spec.geometry) {
        (Family::SingleChannel, _) => (1, 1),
        (Family::MultiChannel, _) => (n_units, n_commands),
        (Family::MatrixExpanded, _) => (n_units, spec.control_count()),
        (Family::MatrixMatrix, _) => (spec.command_pairs().min(n_units), spec.control_count()),
        (Family::ProgramPanel, _) => (spec.indicator_count(), spec.control_count()),
        (Family::Hierarchical, _) => (spec.indicator_count().min(n_units), spec.control_count()),
        (Family::AddressPanel, Geometry::Screens { rows, cols, .. }) => {
            ((rows * cols).min(n_units), spec.control_count())
        }
        _ => (spec.indicator_count(), spec.control_count()),
    };
    if indicators == 0 || controls == 0 {
        return Err(SynthesisError::Panel(crate::panel::PanelError::InvalidSpec(
            "panel has no indicators or no controls".into(),
        )));
    }
    Ok(CompressionProfile::new(n_units, n_commands, indicators, controls))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleEntry {
    pub family: Family,
    pub spec: PanelSpec,
    pub profile: CompressionProfile,
}

/// Smallest panel of each family for `n_units` two-state units.
pub fn representatives(n_units: usize) -> Result<Vec<PanelSpec>, SynthesisError> {
    let m = synthesize_matrix(n_units, true)?;
    let h = synthesize_hierarchy(n_units, None)?;
    let a = synthesize_address(n_units)?;
    Ok(vec![
        PanelSpec::single_channel("single-channel"),
        PanelSpec::multi_channel("multi-channel", n_units),
        m.to_matrix_expanded("matrix-expanded"),
        m.to_matrix_matrix("matrix-matrix"),
        PanelSpec::program_panel("program-panel", m.s, m.b),
        h.to_spec("hierarchical"),
        a.to_spec("address"),
    ])
}

/// One representative per family, from highest to lowest signal
/// compression; ties go to higher command compression.
pub fn enumerate_scale(n_units: usize) -> Result<Vec<ScaleEntry>, SynthesisError> {
    let mut out = representatives(n_units)?
        .into_iter()
        .map(|spec| {
            let profile = compression_profile(&spec, n_units, 2 * n_units)?;
            Ok(ScaleEntry {
                family: spec.family,
                spec,
                profile,
            })
        })
        .collect::<Result<Vec<_>, SynthesisError>>()?;
    out.sort_by(|a, b| {
        b.profile
            .cmp_sig(&a.profile)
            .then(b.profile.cmp_cmd(&a.profile))
            .then(a.family.cmp(&b.family))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_channel_extreme() {
        let p = compression_profile(&PanelSpec::single_channel("s"), 100, 200).unwrap();
        assert_eq!((p.k_sig, p.k_cmd), (100.0, 200.0));
    }

    #[test]
    fn multi_channel_uncompressed() {
        let p = compression_profile(&PanelSpec::multi_channel("m", 37), 37, 74).unwrap();
        assert_eq!((p.k_sig, p.k_cmd), (1.0, 1.0));
    }

    #[test]
    fn soyuz_matrix_matrix() {
        let p = compression_profile(&PanelSpec::matrix_matrix("csd", 16, 24), 192, 384).unwrap();
        assert_eq!(p.indicators, 12);
        assert_eq!(p.controls, 40);
        assert_eq!(p.k_sig, 16.0);
        assert!((p.k_cmd - 9.6).abs() < 1e-12);
    }

    #[test]
    fn scale_ends() {
        let s = enumerate_scale(192).unwrap();
        assert_eq!(s.first().unwrap().family, Family::SingleChannel);
        assert_eq!(s.last().unwrap().family, Family::MultiChannel);
        let pos = |f| s.iter().position(|e| e.family == f).unwrap();
        assert!(pos(Family::MatrixMatrix) < pos(Family::MatrixExpanded));
    }
}
