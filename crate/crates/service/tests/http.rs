mod common;

use axum::http::StatusCode;
use common::{app, call, call_raw};
use cscp_core::fixtures;
use cscp_core::panel::{Binding, PressOutcome};
use cscp_service::{Delta, Snapshot};
use serde_json::{json, Value};

async fn create(app: &cscp_service::AppState, body: Value) -> Snapshot {
    let (status, v) = call(app, "POST", "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    serde_json::from_value(v["snapshot"].clone()).unwrap()
}

async fn event(app: &cscp_service::AppState, id: &str, ev: Value) -> Delta {
    let (status, v) = call(app, "POST", &format!("/sessions/{id}/events"), Some(ev)).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    serde_json::from_value(v).unwrap()
}

async fn tick(app: &cscp_service::AppState, id: &str, dt: f64) -> Delta {
    let (status, v) = call(app, "POST", &format!("/sessions/{id}/tick"), Some(json!({"dt": dt}))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    serde_json::from_value(v).unwrap()
}

fn select(index: usize) -> Value {
    json!({"kind": {"type": "select_system", "index": index}, "timestamp": 0.0})
}

fn command(index: usize, switch: &str) -> Value {
    json!({"kind": {"type": "command", "index": index, "switch": switch}, "timestamp": 0.0})
}

#[tokio::test]
async fn fresh_session_is_dark_on_an_all_off_plant() {
    let app = app();
    for spec in ["csd-r", "csf-16", "conv-192"] {
        let snap = create(&app, json!({"spec_id": spec, "plant_id": "soyuz-7k"})).await;
        assert!(snap.view.cells.iter().all(|c| !c.lit), "{spec}");
        assert_eq!(snap.view.clock, 0.0);
        assert_eq!(snap.view.selection.selected_system, None);
        assert!(snap.view.programs.iter().all(|p| !p.active));
        assert_eq!(snap.version, 0);
        assert_eq!(snap.digest, snap.view.digest());
    }
}

#[tokio::test]
async fn unknown_fixtures_are_not_found() {
    let app = app();
    for body in [
        json!({"spec_id": "nope", "plant_id": "soyuz-7k"}),
        json!({"spec_id": "csd-r", "plant_id": "nope"}),
        json!({"spec_id": "csd-r", "plant_id": "soyuz-7k", "scenario_id": "nope"}),
    ] {
        let (status, v) = call(&app, "POST", "/sessions", Some(body)).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(v["error"], "not_found");
    }
}

#[tokio::test]
async fn attached_scenario_shows_first_step() {
    let app = app();
    let snap = create(
        &app,
        json!({"spec_id": "csd-r", "plant_id": "soyuz-7k", "scenario_id": "checking-run"}),
    )
    .await;
    let scenario = fixtures::scenario("checking-run").unwrap();
    let checklist = snap.view.checklist.unwrap();
    assert_eq!(checklist.index, 0);
    assert_eq!(checklist.total, scenario.steps.len());
    assert_eq!(checklist.current, Some(scenario.steps[0]));
}

#[tokio::test]
async fn select_then_command_lights_one_indicator() {
    let app = app();
    let snap = create(&app, json!({"spec_id": "csd-r", "plant_id": "soyuz-7k"})).await;
    let id = snap.session_id.to_string();
    let d = event(&app, &id, select(2)).await;
    assert_eq!(d.outcome, Some(PressOutcome::Accepted));
    assert_eq!(d.selection.unwrap().selected_system, Some(2));
    assert!(d.cells.iter().all(|c| !c.cell.lit));
    let d = event(&app, &id, command(5, "on")).await;
    let newly_lit: Vec<_> = d.cells.iter().filter(|c| c.cell.lit).collect();
    assert_eq!(newly_lit.len(), 1);
    assert_eq!(newly_lit[0].index, 5);
    assert_eq!(d.emissions.len(), 1);
    assert_eq!(d.units.len(), 1);
    assert_eq!((d.units[0].unit.system, d.units[0].unit.unit), (2, 5));
}

#[tokio::test]
async fn guarded_command_with_guard_closed_changes_nothing() {
    let app = app();
    let snap = create(&app, json!({"spec_id": "csd-g", "plant_id": "soyuz-7k"})).await;
    let id = snap.session_id.to_string();
    event(&app, &id, select(0)).await;
    let d = event(&app, &id, command(11, "on")).await;
    assert_eq!(d.outcome, Some(PressOutcome::GuardClosed));
    assert!(d.units.is_empty() && d.emissions.is_empty() && d.changes.is_empty());

    event(&app, &id, json!({"kind": {"type": "guard_toggle"}, "timestamp": 0.0})).await;
    let d = event(&app, &id, command(11, "on")).await;
    assert_eq!(d.outcome, Some(PressOutcome::Accepted));
    assert_eq!(d.units.len(), 1);
}

#[tokio::test]
async fn lamp_test_lights_everything_then_restores() {
    let app = app();
    let snap = create(&app, json!({"spec_id": "csf-16", "plant_id": "soyuz-7k"})).await;
    let id = snap.session_id.to_string();
    event(&app, &id, select(1)).await;
    event(&app, &id, command(3, "on")).await;
    let (_, before) = call(&app, "GET", &format!("/sessions/{id}/snapshot"), None).await;
    let before: Snapshot = serde_json::from_value(before).unwrap();

    let press = |pressed: bool| json!({"kind": {"type": "lamp_test", "pressed": pressed}, "timestamp": 0.0});
    event(&app, &id, press(true)).await;
    let (_, held) = call(&app, "GET", &format!("/sessions/{id}/snapshot"), None).await;
    let held: Snapshot = serde_json::from_value(held).unwrap();
    assert!(held.view.cells.iter().all(|c| c.lit));

    event(&app, &id, press(false)).await;
    let (_, after) = call(&app, "GET", &format!("/sessions/{id}/snapshot"), None).await;
    let after: Snapshot = serde_json::from_value(after).unwrap();
    assert_eq!(after.view.cells, before.view.cells);
}

#[tokio::test]
async fn program_entry_due_within_tick_lights_execution_indicator() {
    let app = app();
    let snap = create(&app, json!({"spec_id": "prog-p0", "plant_id": "soyuz-7k-auto"})).await;
    let id = snap.session_id.to_string();
    event(&app, &id, select(0)).await;
    let plant = fixtures::plant("soyuz-7k-auto").unwrap();
    let first_due = plant.programs[0].entries[0].issue_offset;
    let d = tick(&app, &id, first_due + 0.5).await;
    assert!(d.program_events.iter().any(|e| matches!(
        e,
        cscp_core::panel::ProgramEvent::Issued { program: 0, entry: 0, .. }
    )));
    let (_, v) = call(&app, "GET", &format!("/sessions/{id}/snapshot"), None).await;
    let snap: Snapshot = serde_json::from_value(v).unwrap();
    let led = snap
        .view
        .cells
        .iter()
        .find(|c| c.binding == Binding::Entry { program: 0, entry: 0 })
        .unwrap();
    assert!(led.lit);
}

#[tokio::test]
async fn faulted_entry_past_deadline_prompts_until_issued_by_hand() {
    let app = app();
    let snap = create(
        &app,
        json!({"spec_id": "csd-r", "plant_id": "soyuz-7k-auto", "faults": [[0, 0]]}),
    )
    .await;
    let id = snap.session_id.to_string();
    let plant = fixtures::plant("soyuz-7k-auto").unwrap();
    let p = &plant.programs[0];
    let deadline = p.scheduled_start.unwrap() + p.entries[0].deadline_offset;
    let target = p.entries[0].target;

    let d = tick(&app, &id, deadline - 1.0).await;
    assert!(d.prompts.is_none());
    let d = tick(&app, &id, 2.0).await;
    let prompts = d.prompts.unwrap();
    assert_eq!(prompts.len(), 1);
    assert_eq!((prompts[0].program, prompts[0].entry), (0, 0));
    assert_eq!(prompts[0].target, target);

    let t = deadline + 1.5;
    let at = |v: Value| {
        let mut v = v;
        v["timestamp"] = json!(t);
        v
    };
    event(&app, &id, at(select(target.system))).await;
    let d = event(&app, &id, at(command(target.unit, "on"))).await;
    assert_eq!(d.prompts, Some(Vec::new()));
    assert_eq!(d.overdue, Some(Vec::new()));
}

#[tokio::test]
async fn without_programs_ticks_only_move_the_clock() {
    let app = app();
    let snap = create(&app, json!({"spec_id": "csd-r", "plant_id": "soyuz-7k"})).await;
    let id = snap.session_id.to_string();
    let a = tick(&app, &id, 0.1).await;
    let b = tick(&app, &id, 0.1).await;
    assert!(a.clock_only() && b.clock_only());
    assert!(b.clock > a.clock);
    assert!(a.program_events.is_empty() && b.program_events.is_empty());
}

#[tokio::test]
async fn bad_requests_carry_reasons() {
    let app = app();
    let snap = create(&app, json!({"spec_id": "csd-r", "plant_id": "soyuz-7k"})).await;
    let id = snap.session_id.to_string();
    let uri = format!("/sessions/{id}/events");

    let (status, v) = call_raw(&app, "POST", &uri, Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(!v["reason"].as_str().unwrap().is_empty());

    let (status, v) = call(&app, "POST", &uri, Some(json!({"kind": {"type": "warp"}, "timestamp": 0.0}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["reason"].as_str().unwrap().contains("warp"));

    let (status, v) = call(&app, "POST", &uri, Some(select(99))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"], "rejected");

    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/tick"), Some(json!({"dt": 0.0}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    // Rejected events leave no trace.
    let (_, v) = call(&app, "GET", &format!("/sessions/{id}/log"), None).await;
    assert!(v["records"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn unknown_and_closed_sessions() {
    let app = app();
    let (status, _) = call(&app, "GET", "/sessions/00000000-0000-0000-0000-000000000000/snapshot", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "POST", "/sessions/garbage/events", Some(select(0))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let snap = create(&app, json!({"spec_id": "csd-r", "plant_id": "soyuz-7k"})).await;
    let id = snap.session_id.to_string();
    let (status, _) = call(&app, "DELETE", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/events"), Some(select(0))).await;
    assert_eq!(status, StatusCode::GONE);
    assert_eq!(v["error"], "gone");
}

#[tokio::test]
async fn fixtures_are_listed() {
    let app = app();
    let (status, v) = call(&app, "GET", "/fixtures", None).await;
    assert_eq!(status, StatusCode::OK);
    let panels: Vec<&str> = v["panels"].as_array().unwrap().iter().map(|p| p.as_str().unwrap()).collect();
    assert!(panels.contains(&"csd-r") && panels.contains(&"prog-p0"));
    assert_eq!(v["plants"].as_array().unwrap().len(), fixtures::PLANTS.len());
}

#[tokio::test]
async fn remote_command_blinks_on_signaling_panel() {
    let app = app();
    let snap = create(&app, json!({"spec_id": "csd-r", "plant_id": "soyuz-7k"})).await;
    let id = snap.session_id.to_string();
    event(&app, &id, select(4)).await;
    let (status, v) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/remote"),
        Some(json!({"unit": {"system": 4, "unit": 7}, "desired": "on"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{v}");
    let d: Delta = serde_json::from_value(v).unwrap();
    let cell = d.cells.iter().find(|c| c.index == 7).unwrap();
    assert!(cell.cell.lit && cell.cell.blinking);

    let d = event(
        &app,
        &id,
        json!({"kind": {"type": "ack", "cell": 7}, "timestamp": 0.0}),
    )
    .await;
    assert_eq!(d.unacked, Some(Vec::new()));
}

#[tokio::test]
async fn shared_plant_brokers_changes_between_panels() {
    let app = app();
    let left = create(
        &app,
        json!({"spec_id": "csd-l", "plant_id": "soyuz-7k", "shared_plant": "drill"}),
    )
    .await;
    let right = create(
        &app,
        json!({"spec_id": "csd-r", "plant_id": "soyuz-7k", "shared_plant": "drill"}),
    )
    .await;
    let (l, r) = (left.session_id.to_string(), right.session_id.to_string());
    event(&app, &r, select(3)).await;
    event(&app, &l, select(3)).await;
    event(&app, &l, command(2, "on")).await;

    let (_, v) = call(&app, "GET", &format!("/sessions/{r}/snapshot"), None).await;
    let snap: Snapshot = serde_json::from_value(v).unwrap();
    assert_eq!(snap.view.units[3][2], cscp_core::panel::Switch::On);
    assert!(snap.view.cells[2].lit && snap.view.cells[2].blinking);

    let (_, v) = call(&app, "GET", &format!("/sessions/{l}/snapshot"), None).await;
    let snap: Snapshot = serde_json::from_value(v).unwrap();
    assert!(snap.view.cells[2].lit && !snap.view.cells[2].blinking);

    let (status, _) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({"spec_id": "mm-81", "plant_id": "std-81", "shared_plant": "drill"})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn checklist_advances_as_steps_are_satisfied() {
    let app = app();
    let snap = create(
        &app,
        json!({"spec_id": "csd-r", "plant_id": "soyuz-7k", "scenario_id": "checking-run"}),
    )
    .await;
    let id = snap.session_id.to_string();
    // First step verifies (0, 0) off: satisfied once system 0 is displayed.
    let d = event(&app, &id, select(0)).await;
    assert_eq!(d.checklist.unwrap().index, 1);
    // Second step sets (1, 0) on.
    event(&app, &id, select(1)).await;
    let d = event(&app, &id, command(0, "on")).await;
    assert_eq!(d.checklist.unwrap().index, 2);
}
