use cscp_core::fixtures::{self, build};
use cscp_core::io::{
    parse_document, replay_session, serialize_document, serialize_panel_spec, session_text, LintCase,
    SessionRecord,
};
use cscp_core::operator::Scenario;
use cscp_core::panel::{PanelSpec, PlantState};
use cscp_core::synthesis::lint_autonomy;

fn names<T>(files: fixtures::Embedded, items: &[T], id: impl Fn(&T) -> String) {
    let shipped: Vec<&str> = files.iter().map(|(n, _)| *n).collect();
    let mut built: Vec<String> = items.iter().map(id).collect();
    built.sort();
    assert_eq!(shipped, built, "run `cargo run -p cscp-core --example gen_fixtures`");
}

#[test]
fn shipped_files_match_builders() {
    let plants = build::plants();
    names(fixtures::PLANTS, &plants, |p| p.id.clone());
    for p in &plants {
        assert_eq!(fixtures::plant(&p.id).as_ref(), Some(p));
        let text = fixtures::PLANTS.iter().find(|(n, _)| *n == p.id).unwrap().1;
        assert_eq!(serialize_document(p).unwrap(), text);
    }
    let panels = build::panels();
    names(fixtures::PANELS, &panels, |p| p.id.clone());
    for p in &panels {
        let text = fixtures::PANELS.iter().find(|(n, _)| *n == p.id).unwrap().1;
        assert_eq!(serialize_panel_spec(p), text);
    }
    let scenarios = build::scenarios();
    names(fixtures::SCENARIOS, &scenarios, |s| s.id.clone());
    for s in &scenarios {
        let text = fixtures::SCENARIOS.iter().find(|(n, _)| *n == s.id).unwrap().1;
        assert_eq!(serialize_document(s).unwrap(), text);
    }
    let cases = build::lint_cases();
    names(fixtures::LINT, &cases, |c| c.id.clone());
    for c in &cases {
        let text = fixtures::LINT.iter().find(|(n, _)| *n == c.id).unwrap().1;
        assert_eq!(serialize_document(c).unwrap(), text);
    }
    let sessions = build::sessions();
    names(fixtures::SESSIONS, &sessions, |(n, _)| n.clone());
    for (name, record) in &sessions {
        assert_eq!(Some(session_text(record).as_str()), fixtures::session_text(name));
    }
}

#[test]
fn every_fixture_round_trips() {
    for (_, text) in fixtures::PANELS {
        let spec: PanelSpec = parse_document(text).unwrap();
        assert_eq!(parse_document::<PanelSpec>(&serialize_panel_spec(&spec)).unwrap(), spec);
    }
    for (_, text) in fixtures::PLANTS {
        let p: PlantState = parse_document(text).unwrap();
        assert_eq!(parse_document::<PlantState>(&serialize_document(&p).unwrap()).unwrap(), p);
    }
    for (_, text) in fixtures::SCENARIOS {
        let s: Scenario = parse_document(text).unwrap();
        assert_eq!(parse_document::<Scenario>(&serialize_document(&s).unwrap()).unwrap(), s);
    }
    for (_, text) in fixtures::SESSIONS {
        let r: SessionRecord = parse_document(text).unwrap();
        assert_eq!(session_text(&r), *text);
    }
}

#[test]
fn shipped_panels_bind_their_plants() {
    let soyuz = fixtures::plant("soyuz-7k").unwrap();
    let auto = fixtures::plant("soyuz-7k-auto").unwrap();
    let std = fixtures::plant("std-81").unwrap();
    for id in ["csd-r", "csd-l", "csf-16", "conv-192"] {
        let spec = fixtures::panel(id).unwrap();
        spec.check_binding(&soyuz).unwrap();
        spec.check_binding(&auto).unwrap();
    }
    for id in ["mm-81", "me-81", "mc-81", "addr-81", "hier-81", "single-81"] {
        fixtures::panel(id).unwrap().check_binding(&std).unwrap();
    }
    fixtures::panel("prog-p0").unwrap().check_binding(&auto).unwrap();
}

#[test]
fn lint_corpus_counts() {
    let cases: Vec<LintCase> = fixtures::lint_cases();
    assert_eq!(cases.len(), 20);
    assert_eq!(cases.iter().filter(|c| c.expected_violations == 0).count(), 10);
    for c in &cases {
        let report = lint_autonomy(&c.plant, &c.layout, &c.functions).unwrap();
        assert_eq!(report.violations.len(), c.expected_violations, "{}", c.id);
    }
}

#[test]
fn shipped_sessions_replay_identically() {
    for (name, text) in fixtures::SESSIONS {
        let verdict = replay_session(text).unwrap();
        assert!(verdict.ok(), "{name}: {verdict:?}");
    }
}

#[test]
fn replay_detects_tampering() {
    let text = fixtures::SESSIONS[0].1;
    let tampered = text.replacen("\"t_press\": 0.350000", "\"t_press\": 0.400000", 1);
    let v = replay_session(&tampered).unwrap();
    assert!(!v.digest_matches);
    assert!(!v.identical);
    assert!(v.first_difference.is_some());
}
