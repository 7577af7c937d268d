//! Optional on-disk transcripts: one JSON line per turn, one file per
//! session.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use scholarbot::agent::TurnResult;

#[derive(Debug)]
pub struct TranscriptLog {
    dir: PathBuf,
    lock: Mutex<()>,
}

impl TranscriptLog {
    pub fn new(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir.as_ref())?;
        Ok(TranscriptLog {
            dir: dir.as_ref().to_path_buf(),
            lock: Mutex::new(()),
        })
    }

    /// File holding a session's turns; unsafe characters in the id become `_`.
    pub fn path_for(&self, session_id: &str) -> PathBuf {
        let name: String = session_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        self.dir.join(format!("{name}.jsonl"))
    }

    /// Appends a turn; failures are logged, never raised.
    pub fn append(&self, turn: &TurnResult) {
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let line = match serde_json::to_string(turn) {
            Ok(l) => l,
            Err(e) => {
                log::error!("serializing turn: {e}");
                return;
            }
        };
        let path = self.path_for(&turn.session_id);
        let written = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .and_then(|mut f| writeln!(f, "{line}"));
        if let Err(e) = written {
            log::error!("writing {}: {e}", path.display());
        }
    }
}
