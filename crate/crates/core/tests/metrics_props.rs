use proptest::prelude::*;

use cscp_core::fixtures;
use cscp_core::metrics::{relative_metrics, response_time_table, wire_counts, CostCoefficients, MetricsError};
use cscp_core::operator::TimeModelParams;
use cscp_core::panel::PanelSpec;
use cscp_core::synthesis::synthesize_matrix;

fn trio(s: usize, b: usize, n: usize) -> Vec<PanelSpec> {
    vec![
        PanelSpec::multi_channel("mc", n),
        PanelSpec::matrix_expanded("me", s, b),
        PanelSpec::matrix_matrix("mm", s, b),
    ]
}

#[test]
fn wire_examples() {
    assert_eq!(wire_counts(&PanelSpec::single_channel("s"), 192).unwrap(), (1, 1));
    // Rows plus columns of each matrix: 16 selectors + 24 command buttons
    // drive commands; 12 indicators + 16 selector lines carry signals.
    assert_eq!(wire_counts(&fixtures::panel("csd-r").unwrap(), 192).unwrap(), (16 + 24, 12 + 16));
    assert_eq!(wire_counts(&fixtures::panel("csf-16").unwrap(), 192).unwrap(), (16 + 24, 192));
    assert!(matches!(
        wire_counts(&PanelSpec::matrix_matrix("x", 2, 4), 192),
        Err(MetricsError::Unbound { .. })
    ));
}

#[test]
fn conventional_signal_wires_vs_matrix() {
    let rows = relative_metrics(&trio(16, 24, 192), 192, "mm", &CostCoefficients::default()).unwrap();
    assert!((rows[0].nprsl - 192.0 / 28.0).abs() < 1e-12);
    assert_eq!(rows[2].relative(), [1.0; 5]);
    for r in &rows {
        assert!(r.g >= 1.0 && r.s_area >= 1.0 && r.w >= 1.0, "{}", r.spec_id);
    }
}

#[test]
fn panel_only_mass_option() {
    let c = CostCoefficients {
        mass_includes_wiring: false,
        ..CostCoefficients::default()
    };
    let rows = relative_metrics(&trio(16, 24, 192), 192, "mm", &c).unwrap();
    let mm = &rows[2].absolute;
    assert_eq!(mm.mass, mm.panel_mass);
    assert!(mm.wire_mass > 0.0);
}

#[test]
fn zero_coefficient_rejected() {
    let c = CostCoefficients {
        area_per_indicator: 0.0,
        ..CostCoefficients::default()
    };
    assert!(relative_metrics(&trio(16, 24, 192), 192, "mm", &c).is_err());
}

#[test]
fn empty_task_list_gives_empty_table() {
    let plant = fixtures::plant("std-81").unwrap();
    let t = response_time_table(&[(fixtures::panel("mm-81").unwrap(), plant)], &[], &TimeModelParams::default())
        .unwrap();
    assert!(t.rows.is_empty());
    assert_eq!(t.spec_ids, vec!["mm-81"]);
}

proptest! {
    #[test]
    fn normalization_and_dominance(n in 2usize..600, base in 0usize..3) {
        let g = synthesize_matrix(n, true).unwrap();
        let specs = trio(g.s, g.b, n);
        let id = ["mc", "me", "mm"][base];
        let rows = relative_metrics(&specs, n, id, &CostCoefficients::default()).unwrap();
        prop_assert_eq!(rows[base].relative(), [1.0; 5]);
        let again = relative_metrics(&specs, n, id, &CostCoefficients::default()).unwrap();
        prop_assert_eq!(&rows, &again);
        if n > g.s + g.b {
            let (mc, me, mm) = (&rows[0].absolute, &rows[1].absolute, &rows[2].absolute);
            prop_assert!(me.nprsl > mm.nprsl);
            prop_assert!(mc.nprkl > me.nprkl);
        }
    }
}
