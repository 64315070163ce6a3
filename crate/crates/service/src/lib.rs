//! Live panel sessions over HTTP and WebSocket.

pub mod app;
pub mod error;
pub mod hub;
pub mod protocol;

pub use app::{router, serve, AppState, Role, ServiceConfig, SessionLogBody};
pub use error::ServiceError;
pub use protocol::{apply_delta, Delta, Envelope, Message, PanelView, Snapshot};
