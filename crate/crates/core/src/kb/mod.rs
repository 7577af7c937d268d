//! Knowledge-base snapshots: record types, loading with per-record
//! diagnostics, connectors, periodic refresh and entity lookup.

mod connector;
mod lookup;
pub mod records;
mod snapshot;

use thiserror::Error;

pub use connector::{Connector, ConnectorMode, FileConnector, ReplayConnector};
pub use lookup::{best_match, lookup_entity, normalize};
pub use records::*;
pub use snapshot::{
    load_snapshot, refresh_snapshot, Diagnostic, KbSnapshot, Manifest, SharedSnapshot,
    DEFAULT_REFRESH_DAYS, RECORD_FILES, SCHEMA_VERSION,
};

#[derive(Debug, Error)]
pub enum KbError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{file}: schema version {found} is not supported")]
    Version { file: String, found: u32 },
    #[error("connector failed: {0}")]
    Connector(String),
}
