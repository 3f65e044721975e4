//! HTTP session service: upload, analyze, continue, end, explain, edit,
//! export and persist, plus the mentor proxy.

pub mod api;
pub mod doc;
pub mod error;
pub mod input;
pub mod mentor_http;
pub mod session;
pub mod store;

pub use api::{router, serve, AppState, ServiceConfig, OPENAPI};
pub use error::ServiceError;
pub use input::{decode_input, Decoded, InputFormat};
pub use session::{Action, EditRecord, Op, Session, SessionState, SessionSummary};
pub use store::{SavedSession, Store, SCHEMA_VERSION};
