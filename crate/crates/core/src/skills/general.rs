use super::SkillContext;
use crate::state::DialogueState;

/// Entity slots recall-context can echo, in priority order.
const ENTITY_SLOTS: [&str; 7] = [
    "PAPER_TITLE",
    "CONF_NAME",
    "PERSON_NAME",
    "TUTORIAL_TITLE",
    "KEYNOTE_TITLE",
    "EVENT_NAME",
    "NEWS_TOPIC",
];

/// Canned response of the same intent, without slots.
pub fn echo(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    vec![ctx.respond(input, &input.intent)]
}

pub fn exit(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    vec![ctx.respond(input, "goodbye"), ctx.respond(input, "take-survey")]
}

/// Echoes the newest entity found in memory.
pub fn context(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    let mut out = ctx.respond(input, &input.intent);
    let found = ctx
        .memory
        .recent()
        .filter(|s| s.intent != input.intent)
        .find_map(|s| ENTITY_SLOTS.iter().find_map(|k| s.slots.get(*k)));
    if let Some(v) = found {
        out.slots.insert(v.slot_type.clone(), v.clone());
    }
    vec![out]
}
