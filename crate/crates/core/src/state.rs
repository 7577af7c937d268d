//! Dialogue states: the (domain path, intent, slots) records exchanged by
//! NLU, the dialogue manager, skills and NLG.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::schema::{join_path, SchemaRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Input,
    Response,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotValue {
    pub slot_type: String,
    pub surface: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<String>,
}

impl SlotValue {
    pub fn new(slot_type: impl Into<String>, surface: impl Into<String>) -> Self {
        SlotValue {
            slot_type: slot_type.into(),
            surface: surface.into(),
            canonical: None,
        }
    }

    pub fn with_canonical(mut self, id: impl Into<String>) -> Self {
        self.canonical = Some(id.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueState {
    pub kind: StateKind,
    pub domain_path: Vec<String>,
    pub intent: String,
    pub slots: BTreeMap<String, SlotValue>,
    pub confidence: f64,
    pub turn_index: usize,
}

impl DialogueState {
    pub fn input(domain_path: Vec<String>, intent: impl Into<String>) -> Self {
        DialogueState {
            kind: StateKind::Input,
            domain_path,
            intent: intent.into(),
            slots: BTreeMap::new(),
            confidence: 1.0,
            turn_index: 0,
        }
    }

    pub fn response(domain_path: Vec<String>, intent: impl Into<String>) -> Self {
        DialogueState {
            kind: StateKind::Response,
            ..Self::input(domain_path, intent)
        }
    }

    /// Builds a state whose domain path is looked up from the registry.
    pub fn for_intent(registry: &SchemaRegistry, kind: StateKind, intent: &str) -> Self {
        let domain_path = registry.domain_of(intent).map(<[_]>::to_vec).unwrap_or_default();
        DialogueState {
            kind,
            ..Self::input(domain_path, intent)
        }
    }

    pub fn with_slot(mut self, slot: &str, surface: impl Into<String>) -> Self {
        self.set_slot(slot, surface);
        self
    }

    pub fn set_slot(&mut self, slot: &str, surface: impl Into<String>) {
        self.slots
            .insert(slot.to_string(), SlotValue::new(slot, surface));
    }

    pub fn slot(&self, name: &str) -> Option<&str> {
        self.slots.get(name).map(|v| v.surface.as_str())
    }

    pub fn at_turn(mut self, turn_index: usize) -> Self {
        self.turn_index = turn_index;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    UnknownIntent(String),
    UnknownDomain(String),
    IntentDomainMismatch { intent: String, domain: String },
    UnknownSlot(String),
    SlotNotInSchema { intent: String, slot: String },
    SlotTypeMismatch { key: String, slot_type: String },
    EmptySurface(String),
    ConfidenceOutOfRange(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownIntent(i) => write!(f, "unknown intent {i:?}"),
            Violation::UnknownDomain(d) => write!(f, "unknown domain path {d:?}"),
            Violation::IntentDomainMismatch { intent, domain } => {
                write!(f, "intent {intent:?} is not registered under {domain:?}")
            }
            Violation::UnknownSlot(s) => write!(f, "unknown slot {s:?}"),
            Violation::SlotNotInSchema { intent, slot } => {
                write!(f, "slot {slot:?} not in the schema of {intent:?}")
            }
            Violation::SlotTypeMismatch { key, slot_type } => {
                write!(f, "slot key {key:?} holds a value of type {slot_type:?}")
            }
            Violation::EmptySurface(s) => write!(f, "slot {s:?} has an empty surface"),
            Violation::ConfidenceOutOfRange(c) => write!(f, "confidence {c} outside [0,1]"),
        }
    }
}

/// Lists every schema violation of `state`; empty iff the state is valid.
pub fn validate_state(state: &DialogueState, registry: &SchemaRegistry) -> Vec<Violation> {
    let mut out = Vec::new();
    let domain = join_path(&state.domain_path);
    if !registry.has_domain(&state.domain_path) {
        out.push(Violation::UnknownDomain(domain.clone()));
    }
    let schema = registry.schema(&state.intent);
    match registry.domain_of(&state.intent) {
        None => out.push(Violation::UnknownIntent(state.intent.clone())),
        Some(owner) if owner != state.domain_path.as_slice() => {
            out.push(Violation::IntentDomainMismatch {
                intent: state.intent.clone(),
                domain,
            })
        }
        Some(_) => {}
    }
    for (key, value) in &state.slots {
        if !registry.is_slot(key) {
            out.push(Violation::UnknownSlot(key.clone()));
        } else if let Some(schema) = schema {
            if !schema.allowed().any(|s| s == key) {
                out.push(Violation::SlotNotInSchema {
                    intent: state.intent.clone(),
                    slot: key.clone(),
                });
            }
        }
        if &value.slot_type != key {
            out.push(Violation::SlotTypeMismatch {
                key: key.clone(),
                slot_type: value.slot_type.clone(),
            });
        }
        if value.surface.trim().is_empty() {
            out.push(Violation::EmptySurface(key.clone()));
        }
    }
    if !(0.0..=1.0).contains(&state.confidence) {
        out.push(Violation::ConfidenceOutOfRange(state.confidence));
    }
    out
}

/// Required slots that memory could not supply.
#[derive(Debug, Clone, PartialEq)]
pub struct UnresolvedSlots {
    /// The state with whatever could be filled.
    pub partial: DialogueState,
    pub missing: Vec<String>,
}

/// Words that point back at an earlier entity instead of naming one.
const REFERENCES: &[&str] = &[
    "it", "its", "this", "that", "these", "those", "they", "them", "their", "there", "he", "she",
    "him", "her", "his", "the", "same", "one", "paper", "conference", "talk", "keynote",
    "tutorial", "event", "person", "author",
];

/// True when a slot surface only refers back ("it", "that paper", "?")
/// and should be resolved from memory by slot type.
pub fn is_reference(surface: &str) -> bool {
    let words: Vec<&str> = surface
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect();
    words.iter().all(|w| REFERENCES.contains(&w.to_lowercase().as_str()))
}

/// Fills required-but-missing slots of `current` from `memory`
/// (most recent first). Slots that only refer back are dropped first;
/// other slots already present are never touched.
pub fn merge_slots(
    current: &DialogueState,
    memory: &[DialogueState],
    registry: &SchemaRegistry,
) -> Result<DialogueState, UnresolvedSlots> {
    let mut merged = current.clone();
    merged.slots.retain(|_, v| !is_reference(&v.surface));
    let required = registry
        .schema(&current.intent)
        .map(|s| s.required.as_slice())
        .unwrap_or(&[]);
    let mut missing = Vec::new();
    for slot in required {
        if merged.slots.contains_key(slot) {
            continue;
        }
        match memory.iter().find_map(|s| s.slots.get(slot)) {
            Some(value) => {
                merged.slots.insert(slot.clone(), value.clone());
            }
            None => missing.push(slot.clone()),
        }
    }
    if missing.is_empty() {
        Ok(merged)
    } else {
        Err(UnresolvedSlots {
            partial: merged,
            missing,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{IntentConfig, NodeConfig, SchemaConfig};
    use proptest::prelude::*;

    fn registry() -> SchemaRegistry {
        let cfg = SchemaConfig {
            version: 1,
            slots: vec!["CONF_NAME".into(), "PAPER_TITLE".into(), "DATE".into()],
            answer_slots: vec!["ABSTRACT".into()],
            nodes: vec![
                NodeConfig {
                    path: "Task".into(),
                    handler: None,
                    intents: vec![],
                },
                NodeConfig {
                    path: "Task.Conference".into(),
                    handler: None,
                    intents: vec![],
                },
                NodeConfig {
                    path: "Task.Conference.Dates".into(),
                    handler: None,
                    intents: vec![],
                },
                NodeConfig {
                    path: "Task.Conference.Dates.Deadlines".into(),
                    handler: None,
                    intents: vec![IntentConfig::new("give-deadlines")
                        .required(&["CONF_NAME"])
                        .optional(&["DATE"])],
                },
                NodeConfig {
                    path: "Task.Paper".into(),
                    handler: None,
                    intents: vec![IntentConfig::new("give-abstract")
                        .required(&["PAPER_TITLE"])
                        .answers(&["ABSTRACT"])],
                },
                NodeConfig {
                    path: "Task.People".into(),
                    handler: None,
                    intents: vec![],
                },
            ],
        };
        SchemaRegistry::from_config(&cfg).unwrap()
    }

    fn path(p: &str) -> Vec<String> {
        crate::schema::split_path(p)
    }

    #[test]
    fn deadline_state_is_valid() {
        let s = DialogueState::input(path("Task.Conference.Dates.Deadlines"), "give-deadlines")
            .with_slot("CONF_NAME", "ACL 2020");
        assert!(validate_state(&s, &registry()).is_empty());
    }

    #[test]
    fn intent_under_wrong_domain() {
        let s = DialogueState::input(path("Task.People"), "give-deadlines");
        assert_eq!(
            validate_state(&s, &registry()),
            vec![Violation::IntentDomainMismatch {
                intent: "give-deadlines".into(),
                domain: "Task.People".into()
            }]
        );
    }

    #[test]
    fn unknown_slot_reported() {
        let s = DialogueState::input(path("Task.Conference.Dates.Deadlines"), "give-deadlines")
            .with_slot("UNKNOWN_SLOT", "x");
        assert_eq!(
            validate_state(&s, &registry()),
            vec![Violation::UnknownSlot("UNKNOWN_SLOT".into())]
        );
    }

    #[test]
    fn follow_up_inherits_title() {
        let reg = registry();
        let current = DialogueState::input(path("Task.Paper"), "give-abstract");
        let memory = [DialogueState::response(path("Task.Paper"), "give-abstract")
            .with_slot("PAPER_TITLE", "X")];
        let merged = merge_slots(&current, &memory, &reg).unwrap();
        assert_eq!(merged.slot("PAPER_TITLE"), Some("X"));
    }

    #[test]
    fn complete_state_unchanged() {
        let reg = registry();
        let current = DialogueState::input(path("Task.Paper"), "give-abstract")
            .with_slot("PAPER_TITLE", "Y");
        let memory = [DialogueState::input(path("Task.Paper"), "give-abstract")
            .with_slot("PAPER_TITLE", "X")];
        assert_eq!(merge_slots(&current, &memory, &reg).unwrap(), current);
    }

    #[test]
    fn most_recent_value_wins() {
        let reg = registry();
        let deadlines = path("Task.Conference.Dates.Deadlines");
        let current = DialogueState::input(deadlines.clone(), "give-deadlines");
        // most recent first
        let memory = [
            DialogueState::input(deadlines.clone(), "give-deadlines")
                .with_slot("CONF_NAME", "EMNLP 2019")
                .at_turn(2),
            DialogueState::input(deadlines, "give-deadlines")
                .with_slot("CONF_NAME", "ACL 2020")
                .at_turn(1),
        ];
        let merged = merge_slots(&current, &memory, &reg).unwrap();
        assert_eq!(merged.slot("CONF_NAME"), Some("EMNLP 2019"));
    }

    #[test]
    fn unresolved_lists_missing() {
        let reg = registry();
        let current = DialogueState::input(path("Task.Paper"), "give-abstract");
        let err = merge_slots(&current, &[], &reg).unwrap_err();
        assert_eq!(err.missing, vec!["PAPER_TITLE".to_string()]);
    }

    #[test]
    fn references_resolve_by_slot_type() {
        let reg = registry();
        let deadlines = path("Task.Conference.Dates.Deadlines");
        let memory = [DialogueState::input(deadlines.clone(), "give-deadlines").with_slot("CONF_NAME", "ACL 2020")];
        for surface in ["it", "that conference", "?", "the same one"] {
            let current = DialogueState::input(deadlines.clone(), "give-deadlines").with_slot("CONF_NAME", surface);
            let merged = merge_slots(&current, &memory, &reg).unwrap();
            assert_eq!(merged.slot("CONF_NAME"), Some("ACL 2020"), "{surface}");
        }
        let current = DialogueState::input(deadlines, "give-deadlines").with_slot("CONF_NAME", "it");
        assert_eq!(merge_slots(&current, &[], &reg).unwrap_err().missing, vec!["CONF_NAME".to_string()]);
        assert!(!is_reference("the acl conference"));
    }

    proptest! {
        #[test]
        fn merge_never_overwrites(present in proptest::option::of("[a-z]{1,6}".prop_filter("naming", |s| !is_reference(s))),
                                  remembered in proptest::collection::vec(proptest::option::of("[a-z]{1,6}"), 0..4)) {
            let reg = registry();
            let mut current = DialogueState::input(path("Task.Paper"), "give-abstract");
            if let Some(v) = &present {
                current.set_slot("PAPER_TITLE", v.clone());
            }
            let memory: Vec<_> = remembered
                .iter()
                .map(|v| {
                    let mut s = DialogueState::input(path("Task.Paper"), "give-abstract");
                    if let Some(v) = v {
                        s.set_slot("PAPER_TITLE", v.clone());
                    }
                    s
                })
                .collect();
            let merged = match merge_slots(&current, &memory, &reg) {
                Ok(s) => s,
                Err(u) => u.partial,
            };
            for (k, v) in &current.slots {
                prop_assert_eq!(merged.slots.get(k), Some(v));
            }
        }
    }
}
