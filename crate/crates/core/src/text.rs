//! Lexical normalization shared by utterances, templates and the ML models.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("input contains no alphanumeric character")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub raw: String,
    pub tokens: Vec<String>,
    pub turn_index: usize,
}

impl Utterance {
    /// Normalizes `raw` at turn 0.
    pub fn new(raw: &str) -> Result<Self, NormalizeError> {
        normalize_utterance(raw)
    }

    pub fn at_turn(mut self, turn_index: usize) -> Self {
        self.turn_index = turn_index;
        self
    }

    /// Builds an utterance from tokens that are already normalized.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        Utterance {
            raw: tokens.join(" "),
            tokens,
            turn_index: 0,
        }
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Lowercases and splits on whitespace; every punctuation character becomes a
/// token of its own. An apostrophe between two word characters stays inside
/// the word (`don't`).
pub fn tokenize(raw: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in raw.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut word = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let inner_apostrophe = (c == '\'' || c == '’')
                && i > 0
                && i + 1 < chars.len()
                && is_word_char(chars[i - 1])
                && is_word_char(chars[i + 1]);
            if is_word_char(c) || inner_apostrophe {
                word.extend(c.to_lowercase());
            } else {
                if !word.is_empty() {
                    tokens.push(std::mem::take(&mut word));
                }
                tokens.push(c.to_lowercase().collect());
            }
        }
        if !word.is_empty() {
            tokens.push(word);
        }
    }
    tokens
}

pub fn normalize_utterance(raw: &str) -> Result<Utterance, NormalizeError> {
    if !raw.chars().any(char::is_alphanumeric) {
        return Err(NormalizeError::Empty);
    }
    Ok(Utterance {
        raw: raw.to_string(),
        tokens: tokenize(raw),
        turn_index: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(raw: &str) -> Vec<String> {
        normalize_utterance(raw).unwrap().tokens
    }

    #[test]
    fn splits_question_mark() {
        assert_eq!(
            toks("When does ACL 2020 start?"),
            ["when", "does", "acl", "2020", "start", "?"]
        );
    }

    #[test]
    fn single_token() {
        assert_eq!(toks("a"), ["a"]);
    }

    #[test]
    fn collapses_whitespace_and_isolates_comma() {
        assert_eq!(toks("  Hello,   WORLD "), ["hello", ",", "world"]);
    }

    #[test]
    fn keeps_inner_apostrophe() {
        assert_eq!(toks("I don't know"), ["i", "don't", "know"]);
        assert_eq!(toks("'quoted'"), ["'", "quoted", "'"]);
    }

    #[test]
    fn rejects_punctuation_only() {
        assert_eq!(normalize_utterance("  ?! "), Err(NormalizeError::Empty));
        assert_eq!(normalize_utterance(""), Err(NormalizeError::Empty));
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(raw in "[A-Za-z0-9 ,.?!'\\-]{0,40}") {
            let first = tokenize(&raw);
            let second = tokenize(&first.join(" "));
            prop_assert_eq!(first, second);
        }

        #[test]
        fn alphanumeric_input_yields_tokens(raw in "[ ,.]{0,5}[a-zA-Z0-9][a-z ,.]{0,20}") {
            let u = normalize_utterance(&raw).unwrap();
            prop_assert!(!u.tokens.is_empty());
        }
    }
}
