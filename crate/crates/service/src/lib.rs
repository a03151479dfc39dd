//! Game sessions over HTTP/JSON.
//!
//! Scenarios (`scenarios/*.json`) and simulation configs (`configs/*.toml`)
//! are read from a content directory at startup. Sessions live in memory
//! and are evicted after a period of inactivity.

pub mod content;
pub mod error;
pub mod routes;
pub mod store;
pub mod view;

pub use content::Content;
pub use error::ApiError;
pub use routes::{router, AppState};
pub use store::{SessionStore, SessionSummary};
pub use view::{StateView, STATE_VIEW_SCHEMA_VERSION};
