use std::collections::{HashMap, HashSet};
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, Weak};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::ws::{CloseFrame, Message as WsMessage, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cscp_core::fixtures;
use cscp_core::operator::validate_scenario;
use cscp_core::panel::ButtonEvent;
use futures::{SinkExt, StreamExt};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast::error::RecvError;
use uuid::Uuid;

use crate::error::ServiceError;
use crate::hub::{Hub, Outbound};
use crate::protocol::{
    ClientMessage, CreateSession, Created, Delta, Envelope, LogRecord, Message, RemoteCommand, Snapshot, TickRequest,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceConfig {
    /// Advance plant time in real time at `tick_rate`.
    pub realtime: bool,
    pub tick_rate: f64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            realtime: true,
            tick_rate: 10.0,
        }
    }
}

#[derive(Default)]
struct Registry {
    sessions: HashMap<Uuid, Arc<Hub>>,
    shared: HashMap<String, Weak<Hub>>,
    closed: HashSet<Uuid>,
}

#[derive(Clone)]
pub struct AppState {
    config: ServiceConfig,
    registry: Arc<Mutex<Registry>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            config,
            registry: Arc::default(),
        }
    }

    fn registry(&self) -> std::sync::MutexGuard<'_, Registry> {
        self.registry.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn hub(&self, id: Uuid) -> Result<Arc<Hub>, ServiceError> {
        let reg = self.registry();
        match reg.sessions.get(&id) {
            Some(h) => Ok(h.clone()),
            None if reg.closed.contains(&id) => Err(ServiceError::Gone(id)),
            None => Err(ServiceError::NotFound(format!("no session {id}"))),
        }
    }

    pub fn create(&self, req: &CreateSession) -> Result<Snapshot, ServiceError> {
        let spec = fixtures::panel(&req.spec_id)
            .ok_or_else(|| ServiceError::NotFound(format!("unknown panel spec {}", req.spec_id)))?;
        let plant = fixtures::plant(&req.plant_id)
            .ok_or_else(|| ServiceError::NotFound(format!("unknown plant {}", req.plant_id)))?;
        let scenario = match &req.scenario_id {
            Some(id) => {
                let s = fixtures::scenario(id).ok_or_else(|| ServiceError::NotFound(format!("unknown scenario {id}")))?;
                validate_scenario(&spec, &plant, &s).map_err(|e| ServiceError::Invalid(e.to_string()))?;
                Some(s)
            }
            None => None,
        };
        let mut reg = self.registry();
        let existing = req
            .shared_plant
            .as_ref()
            .and_then(|k| reg.shared.get(k))
            .and_then(Weak::upgrade);
        let hub = match existing {
            Some(h) => h,
            None => {
                let h = Arc::new(Hub::new(&req.plant_id, plant, self.config.tick_rate));
                if let Some(k) = &req.shared_plant {
                    reg.shared.insert(k.clone(), Arc::downgrade(&h));
                }
                if self.config.realtime {
                    spawn_ticker(Arc::downgrade(&h), self.config.tick_rate);
                }
                h
            }
        };
        let snapshot = {
            let mut st = hub.lock();
            if st.plant_id != req.plant_id {
                return Err(ServiceError::Conflict(format!(
                    "shared plant {} is bound to {}",
                    req.shared_plant.as_deref().unwrap_or_default(),
                    st.plant_id
                )));
            }
            st.add_session(spec, scenario.as_ref(), &req.faults, hub.tick_rate)?
        };
        reg.sessions.insert(snapshot.session_id, hub);
        Ok(snapshot)
    }

    pub fn snapshot(&self, id: Uuid) -> Result<Snapshot, ServiceError> {
        let hub = self.hub(id)?;
        let st = hub.lock();
        st.snapshot(id, hub.tick_rate).ok_or(ServiceError::Gone(id))
    }

    pub fn submit(&self, id: Uuid, ev: &ButtonEvent) -> Result<Delta, ServiceError> {
        self.hub(id)?.lock().press(id, ev)
    }

    pub fn tick(&self, id: Uuid, dt: f64) -> Result<Delta, ServiceError> {
        self.hub(id)?
            .lock()
            .tick(Some(id), dt)
            .map(|d| d.expect("origin is live"))
    }

    pub fn remote(&self, id: Uuid, cmd: &RemoteCommand) -> Result<Delta, ServiceError> {
        self.hub(id)?.lock().remote(id, cmd.unit, cmd.desired)
    }

    pub fn log(&self, id: Uuid) -> Result<Vec<LogRecord>, ServiceError> {
        let hub = self.hub(id)?;
        let st = hub.lock();
        st.sessions.get(&id).map(|s| s.log.clone()).ok_or(ServiceError::Gone(id))
    }

    pub fn close(&self, id: Uuid) -> Result<(), ServiceError> {
        let hub = self.hub(id)?;
        hub.lock().close(id, "session closed");
        let mut reg = self.registry();
        reg.sessions.remove(&id);
        reg.closed.insert(id);
        Ok(())
    }
}

fn spawn_ticker(hub: Weak<Hub>, rate: f64) {
    if !(rate > 0.0) {
        return;
    }
    let period = Duration::from_secs_f64(1.0 / rate);
    tokio::spawn(async move {
        let mut interval = tokio::time::interval(period);
        interval.tick().await;
        loop {
            interval.tick().await;
            let Some(hub) = hub.upgrade() else { break };
            let _ = hub.lock().tick(None, period.as_secs_f64());
        }
    });
}

fn parse_json<T: DeserializeOwned>(body: &[u8]) -> Result<T, ServiceError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

fn session_id(raw: &str) -> Result<Uuid, ServiceError> {
    Uuid::parse_str(raw).map_err(|_| ServiceError::NotFound(format!("no session {raw}")))
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> Result<Response, ServiceError> {
    let req: CreateSession = parse_json(&body)?;
    let snapshot = app.create(&req)?;
    let created = Created {
        session_id: snapshot.session_id,
        snapshot,
    };
    Ok((StatusCode::CREATED, Json(created)).into_response())
}

async fn submit_event(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Delta>, ServiceError> {
    let id = session_id(&id)?;
    app.hub(id)?;
    let ev: ButtonEvent = parse_json(&body)?;
    app.submit(id, &ev).map(Json)
}

async fn get_snapshot(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Snapshot>, ServiceError> {
    app.snapshot(session_id(&id)?).map(Json)
}

async fn tick(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<Delta>, ServiceError> {
    let id = session_id(&id)?;
    app.hub(id)?;
    let req: TickRequest = parse_json(&body)?;
    app.tick(id, req.dt).map(Json)
}

async fn remote(State(app): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<Delta>, ServiceError> {
    let id = session_id(&id)?;
    app.hub(id)?;
    let cmd: RemoteCommand = parse_json(&body)?;
    app.remote(id, &cmd).map(Json)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLogBody {
    pub session_id: Uuid,
    pub records: Vec<LogRecord>,
}

async fn get_log(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionLogBody>, ServiceError> {
    let id = session_id(&id)?;
    Ok(Json(SessionLogBody {
        session_id: id,
        records: app.log(id)?,
    }))
}

async fn delete_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ServiceError> {
    app.close(session_id(&id)?)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn list_fixtures() -> Json<fixtures::FixtureIndex> {
    Json(fixtures::index())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Operator,
    #[default]
    Observer,
}

#[derive(Debug, Deserialize)]
struct StreamQuery {
    #[serde(default)]
    role: Role,
}

async fn stream(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<StreamQuery>,
    ws: WebSocketUpgrade,
) -> Result<Response, ServiceError> {
    let id = session_id(&id)?;
    let hub = app.hub(id)?;
    Ok(ws.on_upgrade(move |socket| run_stream(socket, hub, id, q.role)))
}

struct Outgoing {
    seq: u64,
}

impl Outgoing {
    fn frame(&mut self, message: Message) -> WsMessage {
        self.seq += 1;
        let env = Envelope {
            seq: self.seq,
            message,
        };
        WsMessage::Text(serde_json::to_string(&env).expect("serializable").into())
    }
}

/// Clears the operator slot when the connection ends.
struct OperatorSlot {
    hub: Arc<Hub>,
    id: Uuid,
}

impl Drop for OperatorSlot {
    fn drop(&mut self) {
        if let Some(s) = self.hub.lock().sessions.get_mut(&self.id) {
            s.operator_connected = false;
        }
    }
}

async fn close_with(socket: &mut futures::stream::SplitSink<WebSocket, WsMessage>, reason: &str) {
    let _ = socket
        .send(WsMessage::Close(Some(CloseFrame {
            code: axum::extract::ws::close_code::NORMAL,
            reason: reason.to_string().into(),
        })))
        .await;
}

async fn run_stream(socket: WebSocket, hub: Arc<Hub>, id: Uuid, role: Role) {
    let (mut sink, mut incoming) = socket.split();
    let mut out = Outgoing { seq: 0 };
    let joined = {
        let mut st = hub.lock();
        match st.sessions.get_mut(&id) {
            None => Err("session closed"),
            Some(s) if role == Role::Operator && s.operator_connected => Err("an operator is already connected"),
            Some(s) => {
                if role == Role::Operator {
                    s.operator_connected = true;
                }
                let rx = s.tx.subscribe();
                Ok((rx, st.snapshot(id, hub.tick_rate).expect("live")))
            }
        }
    };
    let (mut rx, snapshot) = match joined {
        Ok(j) => j,
        Err(reason) => {
            let err = ServiceError::Conflict(reason.to_string());
            let _ = sink.send(out.frame(Message::Error(err.body()))).await;
            close_with(&mut sink, reason).await;
            return;
        }
    };
    let _slot = (role == Role::Operator).then(|| OperatorSlot { hub: hub.clone(), id });
    if sink.send(out.frame(Message::Snapshot(Box::new(snapshot)))).await.is_err() {
        return;
    }
    loop {
        tokio::select! {
            pushed = rx.recv() => {
                let frame = match pushed {
                    Ok(Outbound::Delta(d)) => out.frame(Message::Delta(d)),
                    Ok(Outbound::Prompt(p)) => out.frame(Message::Prompt(p)),
                    Ok(Outbound::Closed(reason)) => {
                        close_with(&mut sink, &reason).await;
                        return;
                    }
                    Err(RecvError::Lagged(_)) => {
                        let snap = hub.lock().snapshot(id, hub.tick_rate);
                        match snap {
                            Some(s) => out.frame(Message::Snapshot(Box::new(s))),
                            None => {
                                close_with(&mut sink, "session closed").await;
                                return;
                            }
                        }
                    }
                    Err(RecvError::Closed) => {
                        close_with(&mut sink, "session closed").await;
                        return;
                    }
                };
                if sink.send(frame).await.is_err() {
                    return;
                }
            }
            received = incoming.next() => {
                let text = match received {
                    Some(Ok(WsMessage::Text(t))) => t,
                    Some(Ok(WsMessage::Close(_))) | None | Some(Err(_)) => return,
                    Some(Ok(_)) => continue,
                };
                let reply = match serde_json::from_str::<ClientMessage>(text.as_str()) {
                    Err(e) => Some(Message::Error(ServiceError::BadRequest(e.to_string()).body())),
                    Ok(ClientMessage::Snapshot) => hub
                        .lock()
                        .snapshot(id, hub.tick_rate)
                        .map(|s| Message::Snapshot(Box::new(s))),
                    Ok(ClientMessage::Event(_)) if role != Role::Operator => Some(Message::Error(
                        ServiceError::Invalid("observers cannot operate the panel".into()).body(),
                    )),
                    // The resulting delta arrives through the subscription.
                    Ok(ClientMessage::Event(ev)) => hub.lock().press(id, &ev).err().map(|e| Message::Error(e.body())),
                };
                if let Some(m) = reply {
                    if sink.send(out.frame(m)).await.is_err() {
                        return;
                    }
                }
            }
        }
    }
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", axum::routing::delete(delete_session))
        .route("/sessions/{id}/events", post(submit_event))
        .route("/sessions/{id}/snapshot", get(get_snapshot))
        .route("/sessions/{id}/tick", post(tick))
        .route("/sessions/{id}/remote", post(remote))
        .route("/sessions/{id}/log", get(get_log))
        .route("/sessions/{id}/stream", get(stream))
        .route("/fixtures", get(list_fixtures))
        .with_state(app)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(config))).await
}
