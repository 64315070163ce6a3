//! File formats, digests, replay and workspace plumbing.

pub mod canonical;
pub mod digest;
pub mod documents;
pub mod replay;
pub mod tables;
pub mod workspace;

pub use canonical::{format_fixed, to_canonical_string};
pub use digest::{canonical_digest, input_digest};
pub use documents::{
    parse_document, parse_panel_spec, serialize_document, serialize_panel_spec, Document, LintCase,
    ParseError, SessionInputs, SessionRecord,
};
pub use replay::{record_session, replay_session, session_text, ReplayError, ReplayVerdict};
pub use tables::{metrics_csv, response_csv, MetricsTable};
pub use workspace::{config_path, load_document, write_atomic, Workspace, WorkspaceConfig, WorkspaceError};
