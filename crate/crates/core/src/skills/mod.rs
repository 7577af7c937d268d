//! Skill handlers: turn a routed input state into response states using
//! the knowledge base and the session memory.

mod conference;
mod general;
mod paper;
mod people;

use std::collections::BTreeMap;
use std::sync::Arc;

use chrono::{NaiveDate, NaiveDateTime};

use crate::dm::MemoryStack;
use crate::kb::KbSnapshot;
use crate::schema::SchemaRegistry;
use crate::state::{DialogueState, StateKind};

pub const NO_RESULT: &str = "no-result";
pub const REQUEST_SLOT: &str = "request-slot";
pub const REQUEST_INPUT: &str = "request-input";
pub const MISSING_SLOT: &str = "MISSING_SLOT";

/// Everything a skill may read while handling one turn.
pub struct SkillContext<'a> {
    pub kb: &'a KbSnapshot,
    pub memory: &'a MemoryStack,
    pub registry: &'a SchemaRegistry,
}

impl SkillContext<'_> {
    /// Empty response state of `intent` for the same turn as `input`.
    pub fn respond(&self, input: &DialogueState, intent: &str) -> DialogueState {
        DialogueState::for_intent(self.registry, StateKind::Response, intent).at_turn(input.turn_index)
    }

    /// The not-found response; it carries the input's required slots only.
    pub fn no_result(&self, input: &DialogueState) -> Vec<DialogueState> {
        let mut out = self.respond(input, NO_RESULT);
        if let Some(schema) = self.registry.schema(&input.intent) {
            for slot in &schema.required {
                if let Some(v) = input.slots.get(slot) {
                    out.slots.insert(slot.clone(), v.clone());
                }
            }
        }
        vec![out]
    }
}

/// A skill implementation. Must be pure in (input, context).
pub trait Skill: Send + Sync {
    fn handle(&self, input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState>;
}

impl<F> Skill for F
where
    F: Fn(&DialogueState, &SkillContext) -> Vec<DialogueState> + Send + Sync,
{
    fn handle(&self, input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
        self(input, ctx)
    }
}

pub type SkillSet = BTreeMap<String, Arc<dyn Skill>>;

type Handler = fn(&DialogueState, &SkillContext) -> Vec<DialogueState>;

const BUILTIN: [(&str, Handler); 20] = [
    ("context", general::context),
    ("exit", general::exit),
    ("survey", general::echo),
    ("fallback", general::echo),
    ("feedback", general::echo),
    ("greeting", general::echo),
    ("identity", general::echo),
    ("menu", general::echo),
    ("metadata", paper::metadata),
    ("discourse", paper::discourse),
    ("conference", conference::location),
    ("dates", conference::dates),
    ("deadlines", conference::deadlines),
    ("events", conference::events),
    ("keynotes", conference::keynotes),
    ("social-events", conference::social_events),
    ("tutorials", conference::tutorials),
    ("program", conference::program),
    ("people", people::people),
    ("news", people::news),
];

pub fn builtin_ids() -> Vec<&'static str> {
    BUILTIN.iter().map(|(id, _)| *id).collect()
}

pub fn builtin_skills() -> SkillSet {
    BUILTIN
        .iter()
        .map(|(id, f)| (id.to_string(), Arc::new(*f) as Arc<dyn Skill>))
        .collect()
}

/// Human wording of a slot name, e.g. `CONF_NAME` → `conference name`.
pub fn humanize_slot(slot: &str) -> String {
    match slot {
        "CONF_NAME" => "conference name".into(),
        "PAPER_TITLE" => "paper title".into(),
        other => other.to_lowercase().replace('_', " "),
    }
}

pub(crate) fn fmt_date(d: NaiveDate) -> String {
    d.format("%B %-d, %Y").to_string()
}

pub(crate) fn fmt_datetime(t: NaiveDateTime) -> String {
    t.format("%H:%M on %B %-d, %Y").to_string()
}

/// `a`, `a and b`, `a, b and c`.
pub(crate) fn join_names(names: &[String]) -> String {
    match names {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}
