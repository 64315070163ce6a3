mod common;

use std::time::Duration;

use common::app;
use cscp_core::panel::{ButtonEvent, ButtonKind, Switch};
use cscp_service::protocol::{ClientMessage, CreateSession};
use cscp_service::{apply_delta, router, AppState, Envelope, Message};
use futures::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio_tungstenite::tungstenite::Message as Ws;
use uuid::Uuid;

type Socket = tokio_tungstenite::WebSocketStream<tokio_tungstenite::MaybeTlsStream<tokio::net::TcpStream>>;

async fn start(app: AppState) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(app)).await.unwrap() });
    format!("ws://{addr}")
}

fn session(app: &AppState, spec: &str, plant: &str, scenario: Option<&str>) -> Uuid {
    app.create(&CreateSession {
        spec_id: spec.into(),
        plant_id: plant.into(),
        scenario_id: scenario.map(str::to_string),
        shared_plant: None,
        faults: Vec::new(),
    })
    .unwrap()
    .session_id
}

async fn connect(base: &str, id: Uuid, role: &str) -> Socket {
    let (ws, _) = tokio_tungstenite::connect_async(format!("{base}/sessions/{id}/stream?role={role}"))
        .await
        .unwrap();
    ws
}

async fn next(ws: &mut Socket) -> Option<Envelope> {
    loop {
        let msg = tokio::time::timeout(Duration::from_secs(5), ws.next()).await.expect("message in time")?;
        match msg.unwrap() {
            Ws::Text(t) => return Some(serde_json::from_str(t.as_str()).unwrap()),
            Ws::Close(_) => return None,
            _ => continue,
        }
    }
}

async fn send(ws: &mut Socket, m: &ClientMessage) {
    ws.send(Ws::Text(serde_json::to_string(m).unwrap().into())).await.unwrap();
}

fn press(kind: ButtonKind) -> ClientMessage {
    ClientMessage::Event(ButtonEvent::new(kind, 0.0))
}

#[tokio::test]
async fn operator_stream_is_sequenced_and_faithful() {
    let app = app();
    let base = start(app.clone()).await;
    let id = session(&app, "csd-r", "soyuz-7k", Some("checking-run"));
    let mut op = connect(&base, id, "operator").await;
    let mut obs = connect(&base, id, "observer").await;

    let first = next(&mut op).await.unwrap();
    assert_eq!(first.seq, 1);
    let Message::Snapshot(snap) = first.message else { panic!("snapshot first") };
    let mut view = snap.view.clone();
    assert!(matches!(next(&mut obs).await.unwrap().message, Message::Snapshot(_)));

    let kinds = [
        ButtonKind::SelectSystem { index: 0 },
        ButtonKind::SelectSystem { index: 1 },
        ButtonKind::Command {
            index: 0,
            switch: Switch::On,
        },
        ButtonKind::LampTest { pressed: true },
        ButtonKind::LampTest { pressed: false },
    ];
    for k in kinds {
        send(&mut op, &press(k)).await;
    }
    let mut last = 1;
    for _ in 0..kinds.len() {
        let env = next(&mut op).await.unwrap();
        assert_eq!(env.seq, last + 1);
        last = env.seq;
        let Message::Delta(d) = env.message else { panic!("delta expected") };
        apply_delta(&mut view, &d);
        assert_eq!(view.digest(), d.digest);
    }
    assert_eq!(view.checklist.as_ref().unwrap().index, 2);
    assert_eq!(app.snapshot(id).unwrap().digest, view.digest());

    // Observers see the same transitions but may not operate.
    let mut seen = 0;
    for _ in 0..kinds.len() {
        assert!(matches!(next(&mut obs).await.unwrap().message, Message::Delta(_)));
        seen += 1;
    }
    assert_eq!(seen, kinds.len());
    send(&mut obs, &press(ButtonKind::GuardToggle)).await;
    let env = next(&mut obs).await.unwrap();
    assert_eq!(env.seq, kinds.len() as u64 + 2);
    assert!(matches!(env.message, Message::Error(_)));

    // Rejected events come back as errors in sequence.
    send(&mut op, &press(ButtonKind::SelectSystem { index: 99 })).await;
    let env = next(&mut op).await.unwrap();
    assert_eq!(env.seq, last + 1);
    let Message::Error(e) = env.message else { panic!("error expected") };
    assert_eq!(e.error, "rejected");
}

#[tokio::test]
async fn second_operator_is_refused() {
    let app = app();
    let base = start(app.clone()).await;
    let id = session(&app, "csd-r", "soyuz-7k", None);
    let mut first = connect(&base, id, "operator").await;
    next(&mut first).await.unwrap();
    let mut second = connect(&base, id, "operator").await;
    let env = next(&mut second).await.unwrap();
    assert!(matches!(env.message, Message::Error(_)));
    assert!(next(&mut second).await.is_none());

    drop(first);
    tokio::time::sleep(Duration::from_millis(100)).await;
    let mut third = connect(&base, id, "operator").await;
    assert!(matches!(next(&mut third).await.unwrap().message, Message::Snapshot(_)));
}

#[tokio::test]
async fn overdue_entry_is_pushed_as_prompt() {
    let app = app();
    let base = start(app.clone()).await;
    let id = app
        .create(&CreateSession {
            spec_id: "csd-r".into(),
            plant_id: "soyuz-7k-auto".into(),
            scenario_id: None,
            shared_plant: None,
            faults: vec![(0, 0)],
        })
        .unwrap()
        .session_id;
    let mut ws = connect(&base, id, "observer").await;
    next(&mut ws).await.unwrap();
    let plant = cscp_core::fixtures::plant("soyuz-7k-auto").unwrap();
    let p = &plant.programs[0];
    let deadline = p.scheduled_start.unwrap() + p.entries[0].deadline_offset;
    app.tick(id, deadline + 1.0).unwrap();
    let env = next(&mut ws).await.unwrap();
    assert!(matches!(env.message, Message::Delta(_)));
    let env = next(&mut ws).await.unwrap();
    assert_eq!(env.seq, 3);
    let Message::Prompt(p) = env.message else { panic!("prompt expected") };
    assert_eq!((p.program, p.entry), (0, 0));
}

#[tokio::test]
async fn closing_the_session_closes_the_stream_with_reason() {
    let app = app();
    let base = start(app.clone()).await;
    let id = session(&app, "csd-r", "soyuz-7k", None);
    let mut ws = connect(&base, id, "observer").await;
    next(&mut ws).await.unwrap();
    app.close(id).unwrap();
    let msg = tokio::time::timeout(Duration::from_secs(5), ws.next()).await.unwrap().unwrap().unwrap();
    let Ws::Close(Some(frame)) = msg else { panic!("close frame expected, got {msg:?}") };
    assert_eq!(frame.reason.as_str(), "session closed");
}

#[tokio::test]
async fn realtime_sessions_advance_on_their_own() {
    let app = AppState::new(cscp_service::ServiceConfig {
        realtime: true,
        tick_rate: 10.0,
    });
    let id = session(&app, "csd-r", "soyuz-7k", None);
    tokio::time::sleep(Duration::from_millis(450)).await;
    let clock = app.snapshot(id).unwrap().view.clock;
    assert!(clock >= 0.2, "clock {clock}");
}
