//! Labeled utterances for the ML models and BIO tag helpers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const OUTSIDE: &str = "O";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub tokens: Vec<String>,
    pub intent: String,
    pub tags: Vec<String>,
    /// Template the instance was generated from; empty when read from a file.
    #[serde(default)]
    pub template_id: String,
}

impl Instance {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NluDataset {
    pub split: Split,
    pub instances: Vec<Instance>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("reading dataset {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("dataset is empty")]
    Empty,
}

impl NluDataset {
    pub fn new(split: Split, instances: Vec<Instance>) -> Self {
        NluDataset { split, instances }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Intent labels in sorted order.
    pub fn intents(&self) -> Vec<String> {
        let mut out: Vec<String> = self.instances.iter().map(|i| i.intent.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// One line per instance: `intent TAB token/TAG token/TAG ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for inst in &self.instances {
            out.push_str(&inst.intent);
            out.push('\t');
            let pairs: Vec<String> = inst
                .tokens
                .iter()
                .zip(&inst.tags)
                .map(|(t, g)| format!("{t}/{g}"))
                .collect();
            let _ = writeln!(out, "{}", pairs.join(" "));
        }
        out
    }

    pub fn from_text(text: &str, split: Split) -> Result<Self, DatasetError> {
        let mut instances = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let format_err = |message: String| DatasetError::Format {
                line: idx + 1,
                message,
            };
            let (intent, rest) = line
                .split_once('\t')
                .ok_or_else(|| format_err("missing tab after intent".into()))?;
            let mut tokens = Vec::new();
            let mut tags = Vec::new();
            for pair in rest.split(' ').filter(|p| !p.is_empty()) {
                let (tok, tag) = pair
                    .rsplit_once('/')
                    .ok_or_else(|| format_err(format!("token without tag: {pair:?}")))?;
                tokens.push(tok.to_string());
                tags.push(tag.to_string());
            }
            if !is_well_formed(&tags) {
                return Err(format_err("malformed BIO sequence".into()));
            }
            instances.push(Instance {
                tokens,
                intent: intent.to_string(),
                tags,
                template_id: String::new(),
            });
        }
        Ok(NluDataset { split, instances })
    }

    pub fn load(path: impl AsRef<Path>, split: Split) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_text(&text, split)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Slot type of a `B-X`/`I-X` tag.
pub fn tag_slot(tag: &str) -> Option<&str> {
    tag.strip_prefix("B-").or_else(|| tag.strip_prefix("I-"))
}

/// No `I-X` unless preceded by `B-X` or `I-X`.
pub fn is_well_formed(tags: &[String]) -> bool {
    let mut prev: Option<&str> = None;
    for tag in tags {
        if tag != OUTSIDE && !tag.starts_with("B-") && !tag.starts_with("I-") {
            return false;
        }
        if let Some(slot) = tag.strip_prefix("I-") {
            if prev.and_then(tag_slot) != Some(slot) {
                return false;
            }
        }
        prev = Some(tag);
    }
    true
}

/// An `I-X` that does not continue an `X` span becomes `B-X`.
pub fn repair_bio(tags: &mut [String]) {
    for i in 0..tags.len() {
        if let Some(slot) = tags[i].strip_prefix("I-") {
            let continues = i > 0 && tag_slot(&tags[i - 1]) == Some(slot);
            if !continues {
                tags[i] = format!("B-{slot}");
            }
        }
    }
}

/// Half-open spans `(slot, start, end)` of a well-formed tag sequence.
pub fn bio_spans(tags: &[String]) -> Vec<(String, usize, usize)> {
    let mut out: Vec<(String, usize, usize)> = Vec::new();
    for (i, tag) in tags.iter().enumerate() {
        if let Some(slot) = tag.strip_prefix("B-") {
            out.push((slot.to_string(), i, i + 1));
        } else if let Some(slot) = tag.strip_prefix("I-") {
            match out.last_mut() {
                Some(last) if last.0 == slot && last.2 == i => last.2 = i + 1,
                _ => out.push((slot.to_string(), i, i + 1)),
            }
        }
    }
    out
}

pub fn tags_from_spans(len: usize, spans: &BTreeMap<String, (usize, usize)>) -> Vec<String> {
    let mut tags = vec![OUTSIDE.to_string(); len];
    for (slot, &(start, end)) in spans {
        for (k, tag) in tags.iter_mut().enumerate().take(end).skip(start) {
            *tag = if k == start {
                format!("B-{slot}")
            } else {
                format!("I-{slot}")
            };
        }
    }
    tags
}
