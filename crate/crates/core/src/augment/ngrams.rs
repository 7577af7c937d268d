use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AugmentError;
use crate::text::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramPrefix {
    pub tokens: Vec<String>,
    pub frequency: usize,
}

impl NgramPrefix {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

fn is_word(tok: &str) -> bool {
    tok.chars().any(char::is_alphanumeric)
}

/// Top-`k` 2-, 3- and 4-grams over tokenized lines, most frequent first,
/// ties broken by token order. N-grams containing a punctuation token are
/// not counted.
pub fn top_ngrams(lines: &[Vec<String>], k: usize) -> Vec<NgramPrefix> {
    let mut counts: BTreeMap<&[String], usize> = BTreeMap::new();
    for line in lines {
        for n in 2..=4 {
            for gram in line.windows(n) {
                if gram.iter().all(|t| is_word(t)) {
                    *counts.entry(gram).or_default() += 1;
                }
            }
        }
    }
    let mut ranked: Vec<(&[String], usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(k)
        .map(|(g, f)| NgramPrefix {
            tokens: g.to_vec(),
            frequency: f,
        })
        .collect()
}

/// Reads one-utterance-per-line corpora (empty files are skipped with a
/// warning) and returns their pooled top-`k` n-grams.
pub fn extract_top_ngrams<P: AsRef<Path>>(corpora: &[P], k: usize) -> Result<Vec<NgramPrefix>, AugmentError> {
    if k == 0 {
        return Err(AugmentError::Config("k must be at least 1".into()));
    }
    let mut lines = Vec::new();
    for path in corpora {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| AugmentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let before = lines.len();
        lines.extend(
            text.lines()
                .map(tokenize)
                .filter(|t| !t.is_empty()),
        );
        if lines.len() == before {
            log::warn!("corpus {} is empty, skipped", path.display());
        }
    }
    if lines.is_empty() {
        return Err(AugmentError::Config("all corpora are empty".into()));
    }
    Ok(top_ngrams(&lines, k))
}
