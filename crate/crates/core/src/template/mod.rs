//! Templates of literal tokens, wildcards and typed slot placeholders.
//!
//! The same representation serves rule-based NLU (matching an utterance
//! against a template) and NLG (rendering a template from a response state).

mod file;
mod matcher;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schema::SchemaRegistry;
use crate::state::DialogueState;
use crate::text::tokenize;

pub use file::{load_template_file, load_template_files, parse_templates, TemplateFileError};
pub use matcher::{match_template, match_utterance, Match, MatchResult};

pub const WILDCARD: &str = "...";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Nlu,
    Nlg,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Nlu => "nlu",
            Direction::Nlg => "nlg",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateSource {
    Human,
    Augmented,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Segment {
    Literal(String),
    Slot(String),
    Wildcard,
}

impl Segment {
    pub fn is_literal(&self) -> bool {
        matches!(self, Segment::Literal(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateLabels {
    pub id: String,
    pub direction: Direction,
    pub domain_path: Vec<String>,
    pub intent: String,
    pub source: TemplateSource,
}

impl TemplateLabels {
    pub fn new(id: &str, direction: Direction, domain_path: Vec<String>, intent: &str) -> Self {
        TemplateLabels {
            id: id.to_string(),
            direction,
            domain_path,
            intent: intent.to_string(),
            source: TemplateSource::Human,
        }
    }

    pub fn augmented(mut self) -> Self {
        self.source = TemplateSource::Augmented;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub id: String,
    pub direction: Direction,
    pub domain_path: Vec<String>,
    pub intent: String,
    pub segments: Vec<Segment>,
    pub source: TemplateSource,
    /// The pattern as written; NLG renders from it to keep case and spacing.
    pub pattern: String,
}

impl Template {
    pub fn literal_count(&self) -> usize {
        self.segments.iter().filter(|s| s.is_literal()).count()
    }

    pub fn wildcard_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, Segment::Wildcard))
            .count()
    }

    pub fn placeholders(&self) -> impl Iterator<Item = &str> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Slot(name) => Some(name.as_str()),
            _ => None,
        })
    }

    pub fn placeholder_set(&self) -> BTreeSet<&str> {
        self.placeholders().collect()
    }

    /// Canonical pattern text rebuilt from the segments.
    pub fn canonical_pattern(&self) -> String {
        self.segments
            .iter()
            .map(|s| match s {
                Segment::Literal(t) => t.clone(),
                Segment::Slot(n) => format!("{{{n}}}"),
                Segment::Wildcard => WILDCARD.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Token sequence obtained by substituting each placeholder with the
    /// given (already tokenized) value; wildcards expand to nothing. Returns
    /// the tokens and the half-open token span of every placeholder.
    pub fn instantiate_tokens(
        &self,
        values: &BTreeMap<String, Vec<String>>,
    ) -> Result<(Vec<String>, Spans), TemplateError> {
        let mut tokens = Vec::new();
        let mut spans = BTreeMap::new();
        for seg in &self.segments {
            match seg {
                Segment::Literal(t) => tokens.push(t.clone()),
                Segment::Wildcard => {}
                Segment::Slot(name) => {
                    let value = values
                        .get(name)
                        .filter(|v| !v.is_empty())
                        .ok_or_else(|| TemplateError::MissingSlot(name.clone()))?;
                    let start = tokens.len();
                    tokens.extend(value.iter().cloned());
                    spans.insert(name.clone(), (start, tokens.len()));
                }
            }
        }
        Ok((tokens, spans))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("empty pattern")]
    Empty,
    #[error("unbalanced brace at byte {0}")]
    UnbalancedBrace(usize),
    #[error("invalid placeholder name {0:?}")]
    BadPlaceholder(String),
    #[error("unknown slot {0:?}")]
    UnknownSlot(String),
    #[error("placeholder {0:?} appears twice")]
    DuplicatePlaceholder(String),
    #[error("adjacent placeholders/wildcards at segment {0}")]
    AdjacentPlaceholders(usize),
    #[error("nlu template needs at least one literal token")]
    NoLiteral,
    #[error("wildcards are not allowed in nlg templates")]
    WildcardInNlg,
    #[error("missing value for slot {0:?}")]
    MissingSlot(String),
}

/// Decides which placeholder names a template may use.
pub trait SlotCatalog {
    fn accepts(&self, slot: &str, direction: Direction) -> bool;
}

impl SlotCatalog for SchemaRegistry {
    fn accepts(&self, slot: &str, direction: Direction) -> bool {
        match direction {
            Direction::Nlu => self.slot_inventory.contains(slot),
            Direction::Nlg => self.is_slot(slot),
        }
    }
}

impl SlotCatalog for BTreeSet<String> {
    fn accepts(&self, slot: &str, _: Direction) -> bool {
        self.contains(slot)
    }
}

/// Half-open token span of each placeholder.
pub type Spans = BTreeMap<String, (usize, usize)>;

/// Accepts any syntactically valid placeholder name.
pub struct AnySlot;

impl SlotCatalog for AnySlot {
    fn accepts(&self, _: &str, _: Direction) -> bool {
        true
    }
}

fn valid_slot_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Parses `pattern` (`{SLOT}` placeholders, `...` wildcards, everything else
/// literal text normalized like an utterance).
pub fn compile_template(
    pattern: &str,
    labels: TemplateLabels,
    catalog: &dyn SlotCatalog,
) -> Result<Template, TemplateError> {
    let mut segments = Vec::new();
    let mut seen = BTreeSet::new();
    let mut literal = String::new();

    let flush = |literal: &mut String, segments: &mut Vec<Segment>| {
        for piece in literal.split(WILDCARD).enumerate() {
            if piece.0 > 0 {
                segments.push(Segment::Wildcard);
            }
            segments.extend(tokenize(piece.1).into_iter().map(Segment::Literal));
        }
        literal.clear();
    };

    let mut rest = pattern;
    let mut offset = 0;
    while let Some(pos) = rest.find(['{', '}']) {
        if rest.as_bytes()[pos] == b'}' {
            return Err(TemplateError::UnbalancedBrace(offset + pos));
        }
        literal.push_str(&rest[..pos]);
        let after = &rest[pos + 1..];
        let close = after
            .find(['{', '}'])
            .filter(|&c| after.as_bytes()[c] == b'}')
            .ok_or(TemplateError::UnbalancedBrace(offset + pos))?;
        let name = after[..close].trim();
        if !valid_slot_name(name) {
            return Err(TemplateError::BadPlaceholder(name.to_string()));
        }
        if !catalog.accepts(name, labels.direction) {
            return Err(TemplateError::UnknownSlot(name.to_string()));
        }
        if !seen.insert(name.to_string()) {
            return Err(TemplateError::DuplicatePlaceholder(name.to_string()));
        }
        flush(&mut literal, &mut segments);
        segments.push(Segment::Slot(name.to_string()));
        let consumed = pos + 1 + close + 1;
        offset += consumed;
        rest = &rest[consumed..];
    }
    literal.push_str(rest);
    flush(&mut literal, &mut segments);

    if segments.is_empty() {
        return Err(TemplateError::Empty);
    }
    // Only matching needs a literal between captures; rendering does not.
    let adjacent = segments
        .windows(2)
        .position(|w| !w[0].is_literal() && !w[1].is_literal());
    if let (Direction::Nlu, Some(i)) = (labels.direction, adjacent) {
        return Err(TemplateError::AdjacentPlaceholders(i + 1));
    }
    match labels.direction {
        Direction::Nlu if !segments.iter().any(Segment::is_literal) => {
            return Err(TemplateError::NoLiteral)
        }
        Direction::Nlg if segments.contains(&Segment::Wildcard) => {
            return Err(TemplateError::WildcardInNlg)
        }
        _ => {}
    }

    Ok(Template {
        id: labels.id,
        direction: labels.direction,
        domain_path: labels.domain_path,
        intent: labels.intent,
        segments,
        source: labels.source,
        pattern: pattern.trim().to_string(),
    })
}

fn sanitize_surface(surface: &str) -> String {
    surface.replace('{', "(").replace('}', ")")
}

/// Substitutes every placeholder of the pattern with the slot's surface
/// text. Braces inside slot values are rendered as parentheses so the
/// output never contains `{` or `}`.
pub fn render_template(template: &Template, state: &DialogueState) -> Result<String, TemplateError> {
    if template.direction == Direction::Nlg && template.wildcard_count() > 0 {
        return Err(TemplateError::WildcardInNlg);
    }
    for name in template.placeholders() {
        if !state.slots.contains_key(name) {
            return Err(TemplateError::MissingSlot(name.to_string()));
        }
    }
    let mut out = String::with_capacity(template.pattern.len());
    let mut rest = template.pattern.as_str();
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = open + rest[open..].find('}').expect("compiled pattern has balanced braces");
        let name = rest[open + 1..close].trim();
        out.push_str(&sanitize_surface(&state.slots[name].surface));
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}
