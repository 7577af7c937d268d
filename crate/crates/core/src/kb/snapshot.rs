use std::path::Path;
use std::sync::{Arc, RwLock};

use chrono::{DateTime, Duration, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::records::*;
use super::{Connector, KbError};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_REFRESH_DAYS: i64 = 30;

pub const RECORD_FILES: [&str; 5] = ["papers", "people", "conferences", "events", "news"];

/// Immutable view of every knowledge source at one point in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbSnapshot {
    pub papers: Vec<PaperRecord>,
    pub people: Vec<PersonRecord>,
    pub conferences: Vec<ConferenceRecord>,
    pub events: Vec<EventRecord>,
    pub news: Vec<NewsItem>,
    pub fetched_at: DateTime<Utc>,
    pub source: String,
    pub refresh_interval_days: i64,
}

impl KbSnapshot {
    pub fn empty(fetched_at: DateTime<Utc>) -> Self {
        KbSnapshot {
            papers: vec![],
            people: vec![],
            conferences: vec![],
            events: vec![],
            news: vec![],
            fetched_at,
            source: "empty".into(),
            refresh_interval_days: DEFAULT_REFRESH_DAYS,
        }
    }

    pub fn is_due(&self, now: DateTime<Utc>) -> bool {
        now - self.fetched_at >= Duration::days(self.refresh_interval_days)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub source: String,
    pub fetched_at: DateTime<Utc>,
    #[serde(default = "default_interval")]
    pub refresh_interval_days: i64,
}

fn default_interval() -> i64 {
    DEFAULT_REFRESH_DAYS
}

/// A record that failed to parse or violated an invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub file: String,
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Deserialize)]
struct RecordFile {
    schema_version: u32,
    records: Vec<serde_json::Value>,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, KbError> {
    let text = std::fs::read_to_string(path).map_err(|source| KbError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| KbError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_records<T: DeserializeOwned + Validate>(
    name: &str,
    file: RecordFile,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Vec<T>, KbError> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(KbError::Version {
            file: name.to_string(),
            found: file.schema_version,
        });
    }
    let mut out = Vec::new();
    for (index, value) in file.records.into_iter().enumerate() {
        let problems = match serde_json::from_value::<T>(value) {
            Ok(rec) => {
                let problems = rec.problems();
                if problems.is_empty() {
                    out.push(rec);
                    continue;
                }
                problems
            }
            Err(e) => vec![e.to_string()],
        };
        for message in problems {
            log::warn!("{name}[{index}] rejected: {message}");
            diagnostics.push(Diagnostic {
                file: name.to_string(),
                index,
                message,
            });
        }
    }
    Ok(out)
}

fn load_kind<T: DeserializeOwned + Validate>(
    dir: &Path,
    name: &str,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Vec<T>, KbError> {
    let path = dir.join(format!("{name}.json"));
    if !path.exists() {
        log::warn!("{} missing, no {name} records", path.display());
        return Ok(vec![]);
    }
    parse_records(name, read_json(&path)?, diagnostics)
}

/// Loads `manifest.json` and the record files of a snapshot directory.
/// Invalid records are dropped and reported; the rest load normally.
pub fn load_snapshot(dir: impl AsRef<Path>) -> Result<(KbSnapshot, Vec<Diagnostic>), KbError> {
    let dir = dir.as_ref();
    let manifest: Manifest = read_json(&dir.join("manifest.json"))?;
    if manifest.schema_version != SCHEMA_VERSION {
        return Err(KbError::Version {
            file: "manifest".into(),
            found: manifest.schema_version,
        });
    }
    let mut diags = Vec::new();
    let snapshot = KbSnapshot {
        papers: load_kind(dir, "papers", &mut diags)?,
        people: load_kind(dir, "people", &mut diags)?,
        conferences: load_kind(dir, "conferences", &mut diags)?,
        events: load_kind(dir, "events", &mut diags)?,
        news: load_kind(dir, "news", &mut diags)?,
        fetched_at: manifest.fetched_at,
        source: manifest.source,
        refresh_interval_days: manifest.refresh_interval_days,
    };
    Ok((snapshot, diags))
}

/// Returns a fresh snapshot from `connector` when `current` is due (always,
/// for instant connectors), else `current` itself. A failing connector leaves `current` in place.
pub fn refresh_snapshot(
    connector: &dyn Connector,
    current: &Arc<KbSnapshot>,
    now: DateTime<Utc>,
) -> Arc<KbSnapshot> {
    if connector.mode() == super::ConnectorMode::Bulk && !current.is_due(now) {
        return Arc::clone(current);
    }
    match connector.fetch(now) {
        Ok(fresh) => {
            log::info!("snapshot refreshed from {}", connector.id());
            Arc::new(fresh)
        }
        Err(e) => {
            log::error!("refresh from {} failed, keeping old snapshot: {e}", connector.id());
            Arc::clone(current)
        }
    }
}

/// The snapshot readers currently see. Replacement swaps the whole `Arc`.
#[derive(Debug)]
pub struct SharedSnapshot {
    inner: RwLock<Arc<KbSnapshot>>,
}

impl SharedSnapshot {
    pub fn new(snapshot: KbSnapshot) -> Self {
        SharedSnapshot {
            inner: RwLock::new(Arc::new(snapshot)),
        }
    }

    pub fn current(&self) -> Arc<KbSnapshot> {
        Arc::clone(&self.inner.read().unwrap_or_else(|e| e.into_inner()))
    }

    pub fn replace(&self, snapshot: Arc<KbSnapshot>) {
        *self.inner.write().unwrap_or_else(|e| e.into_inner()) = snapshot;
    }

    /// Runs [`refresh_snapshot`] and publishes the result.
    pub fn refresh(&self, connector: &dyn Connector, now: DateTime<Utc>) -> bool {
        let current = self.current();
        let next = refresh_snapshot(connector, &current, now);
        let changed = !Arc::ptr_eq(&current, &next);
        if changed {
            self.replace(next);
        }
        changed
    }
}
