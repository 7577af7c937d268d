use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{load_snapshot, KbError, KbSnapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectorMode {
    /// Queried on demand; every refresh check fetches.
    Instant,
    /// Downloaded as a whole every refresh interval.
    Bulk,
}

/// A source of knowledge-base records.
pub trait Connector: Send + Sync {
    fn id(&self) -> &str;
    fn mode(&self) -> ConnectorMode;
    /// A complete snapshot stamped with `now`.
    fn fetch(&self, now: DateTime<Utc>) -> Result<KbSnapshot, KbError>;
}

/// Re-reads a snapshot directory.
#[derive(Debug, Clone)]
pub struct FileConnector {
    pub dir: PathBuf,
}

impl FileConnector {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        FileConnector {
            dir: dir.as_ref().to_path_buf(),
        }
    }
}

impl Connector for FileConnector {
    fn id(&self) -> &str {
        "file"
    }

    fn mode(&self) -> ConnectorMode {
        ConnectorMode::Bulk
    }

    fn fetch(&self, now: DateTime<Utc>) -> Result<KbSnapshot, KbError> {
        let (mut snapshot, diags) = load_snapshot(&self.dir)?;
        if !diags.is_empty() {
            log::warn!("{} records rejected while refreshing", diags.len());
        }
        snapshot.fetched_at = now;
        Ok(snapshot)
    }
}

/// Serves recorded responses in order, one per fetch; the last one repeats.
/// Stands in for a live site in tests.
#[derive(Debug)]
pub struct ReplayConnector {
    responses: Vec<Result<KbSnapshot, String>>,
    next: std::sync::atomic::AtomicUsize,
}

impl ReplayConnector {
    pub fn new(responses: Vec<Result<KbSnapshot, String>>) -> Self {
        ReplayConnector {
            responses,
            next: Default::default(),
        }
    }

    /// Loads a recording: a JSON array whose items are either a snapshot
    /// object or `{"error": "..."}`.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, KbError> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Item {
            Error { error: String },
            Snapshot(Box<KbSnapshot>),
        }
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| KbError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let items: Vec<Item> = serde_json::from_str(&text).map_err(|e| KbError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(Self::new(
            items
                .into_iter()
                .map(|i| match i {
                    Item::Error { error } => Err(error),
                    Item::Snapshot(s) => Ok(*s),
                })
                .collect(),
        ))
    }

    pub fn calls(&self) -> usize {
        self.next.load(std::sync::atomic::Ordering::SeqCst)
    }
}

impl Connector for ReplayConnector {
    fn id(&self) -> &str {
        "replay"
    }

    fn mode(&self) -> ConnectorMode {
        ConnectorMode::Bulk
    }

    fn fetch(&self, now: DateTime<Utc>) -> Result<KbSnapshot, KbError> {
        let i = self.next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
        let Some(item) = self.responses.get(i.min(self.responses.len().saturating_sub(1))) else {
            return Err(KbError::Connector("nothing recorded".into()));
        };
        match item {
            Ok(s) => Ok(KbSnapshot {
                fetched_at: now,
                ..s.clone()
            }),
            Err(e) => Err(KbError::Connector(e.clone())),
        }
    }
}
