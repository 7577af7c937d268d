use chrono::{Datelike, NaiveDate};

use super::{fmt_date, fmt_datetime, join_names, SkillContext};
use crate::kb::{best_match, lookup_entity, normalize, ConferenceRecord, EventKind, EventRecord};
use crate::state::{DialogueState, SlotValue};

fn conference<'a>(input: &DialogueState, ctx: &SkillContext<'a>) -> Option<&'a ConferenceRecord> {
    let id = lookup_entity(ctx.kb, "CONF_NAME", input.slot("CONF_NAME")?)?;
    ctx.kb.conferences.iter().find(|c| c.id == id)
}

fn named(out: &mut DialogueState, c: &ConferenceRecord) {
    out.slots.insert(
        "CONF_NAME".into(),
        SlotValue::new("CONF_NAME", c.name.clone()).with_canonical(c.id.clone()),
    );
}

/// Events of `conf_name`, ordered by start time then title.
fn events_of<'a>(ctx: &SkillContext<'a>, conf_name: &str, kind: Option<EventKind>) -> Vec<&'a EventRecord> {
    let key = normalize(conf_name);
    let mut out: Vec<&EventRecord> = ctx
        .kb
        .events
        .iter()
        .filter(|e| normalize(&e.conference) == key && kind.is_none_or(|k| e.kind == k))
        .collect();
    out.sort_by(|a, b| a.start.cmp(&b.start).then_with(|| a.title.cmp(&b.title)));
    out
}

/// The event named by `slot`, restricted to `kind` and, when the input
/// names a known conference, to that conference.
fn event<'a>(
    input: &DialogueState,
    ctx: &SkillContext<'a>,
    slot: &str,
    kind: Option<EventKind>,
) -> Option<&'a EventRecord> {
    let conf = conference(input, ctx);
    if input.slots.contains_key("CONF_NAME") && conf.is_none() {
        return None;
    }
    let pool: Vec<&EventRecord> = ctx
        .kb
        .events
        .iter()
        .filter(|e| kind.is_none_or(|k| e.kind == k))
        .filter(|e| conf.is_none_or(|c| normalize(&e.conference) == normalize(&c.name)))
        .collect();
    let id = best_match(
        pool.iter().map(|e| (e.id.as_str(), e.title.as_str(), e.start.year())),
        input.slot(slot)?,
    )?;
    pool.into_iter().find(|e| e.id == id)
}

fn titles(events: &[&EventRecord]) -> String {
    events
        .iter()
        .map(|e| match e.speakers.as_slice() {
            [] => e.title.clone(),
            s => format!("{} ({})", e.title, join_names(s)),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn location(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    let Some(c) = conference(input, ctx) else {
        return ctx.no_result(input);
    };
    let mut out = ctx.respond(input, &input.intent);
    named(&mut out, c);
    out.set_slot("VENUE", c.venue.clone());
    vec![out]
}

pub fn dates(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    let Some(c) = conference(input, ctx) else {
        return ctx.no_result(input);
    };
    let (Some(start), Some(end)) = (c.start, c.end) else {
        return ctx.no_result(input);
    };
    let mut out = ctx.respond(input, &input.intent);
    named(&mut out, c);
    out.set_slot("START", fmt_date(start));
    out.set_slot("END", fmt_date(end));
    vec![out]
}

pub fn deadlines(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    let mut out = ctx.respond(input, &input.intent);
    if input.intent == "list-upcoming-deadlines" {
        let today = ctx.kb.fetched_at.date_naive();
        let mut upcoming: Vec<(NaiveDate, &str, &str)> = ctx
            .kb
            .conferences
            .iter()
            .flat_map(|c| c.deadlines.iter().map(move |d| (d.date, c.name.as_str(), d.kind.as_str())))
            .filter(|(date, _, _)| *date >= today)
            .collect();
        if upcoming.is_empty() {
            return ctx.no_result(input);
        }
        upcoming.sort();
        let list = upcoming
            .iter()
            .map(|(date, conf, kind)| format!("{conf} {kind} on {}", fmt_date(*date)))
            .collect::<Vec<_>>()
            .join("; ");
        out.set_slot("DEADLINE_LIST", list);
        return vec![out];
    }

    let Some(c) = conference(input, ctx) else {
        return ctx.no_result(input);
    };
    let kind = match input.intent.as_str() {
        "give-notification-date" => "notification",
        "give-camera-ready-date" => "camera-ready",
        _ => "submission",
    };
    let Some(d) = c.deadline(kind) else {
        return ctx.no_result(input);
    };
    named(&mut out, c);
    out.set_slot("DATE", fmt_date(d.date));
    if input.intent == "give-deadlines" {
        out.set_slot("DEADLINE_KIND", kind);
    }
    vec![out]
}

fn list_kind(input: &DialogueState, ctx: &SkillContext, kind: Option<EventKind>) -> Vec<DialogueState> {
    let Some(c) = conference(input, ctx) else {
        return ctx.no_result(input);
    };
    let events = events_of(ctx, &c.name, kind);
    if events.is_empty() {
        return ctx.no_result(input);
    }
    let mut out = ctx.respond(input, &input.intent);
    named(&mut out, c);
    out.set_slot("EVENT_LIST", titles(&events));
    vec![out]
}

/// Time, speaker and location answers for one event.
fn describe(
    input: &DialogueState,
    ctx: &SkillContext,
    slot: &str,
    kind: Option<EventKind>,
    answers: &[&str],
) -> Vec<DialogueState> {
    let Some(e) = event(input, ctx, slot, kind) else {
        return ctx.no_result(input);
    };
    let mut out = ctx.respond(input, &input.intent);
    out.set_slot(slot, e.title.clone());
    for a in answers {
        match *a {
            "TIME" => out.set_slot("TIME", fmt_datetime(e.start)),
            "LOCATION" => out.set_slot("LOCATION", e.location.clone()),
            "SPEAKER" if !e.speakers.is_empty() => out.set_slot("SPEAKER", join_names(&e.speakers)),
            "SPEAKER" => return ctx.no_result(input),
            _ => {}
        }
    }
    vec![out]
}

pub fn events(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    list_kind(input, ctx, None)
}

pub fn keynotes(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    let k = Some(EventKind::Keynote);
    match input.intent.as_str() {
        "give-keynote-time" => describe(input, ctx, "KEYNOTE_TITLE", k, &["TIME", "SPEAKER", "LOCATION"]),
        "give-keynote-speaker" => describe(input, ctx, "KEYNOTE_TITLE", k, &["SPEAKER"]),
        _ => list_kind(input, ctx, k),
    }
}

pub fn social_events(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    match input.intent.as_str() {
        "give-social-event-time" => describe(input, ctx, "EVENT_NAME", None, &["TIME", "LOCATION"]),
        _ => list_kind(input, ctx, Some(EventKind::Social)),
    }
}

pub fn tutorials(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    let k = Some(EventKind::Tutorial);
    match input.intent.as_str() {
        "give-tutorial-time" => describe(input, ctx, "TUTORIAL_TITLE", k, &["TIME", "LOCATION"]),
        "give-tutorial-presenters" => describe(input, ctx, "TUTORIAL_TITLE", k, &["SPEAKER"]),
        _ => list_kind(input, ctx, k),
    }
}

/// Parses `2019-06-03`, `June 3`, `3 June` or `June 3rd`; a missing year
/// is taken from `year`.
pub(crate) fn parse_day(text: &str, year: i32) -> Option<NaiveDate> {
    let t = text.trim();
    if let Ok(d) = NaiveDate::parse_from_str(t, "%Y-%m-%d") {
        return Some(d);
    }
    let cleaned: String = t
        .split_whitespace()
        .map(|w| {
            let w = w.trim_matches(',');
            let digits = w.trim_end_matches(|c: char| c.is_ascii_alphabetic());
            if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
                digits.to_string()
            } else {
                w.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" ");
    let with_year = if cleaned.split_whitespace().count() == 2 {
        format!("{cleaned} {year}")
    } else {
        cleaned
    };
    ["%B %d %Y", "%d %B %Y", "%b %d %Y", "%d %b %Y"]
        .iter()
        .find_map(|f| NaiveDate::parse_from_str(&with_year, f).ok())
}

pub fn program(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    if input.intent == "give-event-location" {
        return describe(input, ctx, "EVENT_NAME", None, &["LOCATION", "TIME"]);
    }
    let Some(c) = conference(input, ctx) else {
        return ctx.no_result(input);
    };
    let mut events = events_of(ctx, &c.name, None);
    let mut out = ctx.respond(input, &input.intent);
    if let Some(day) = input.slot("DATE") {
        let Some(d) = parse_day(day, c.year) else {
            return ctx.no_result(input);
        };
        events.retain(|e| e.start.date() == d);
        out.set_slot("DATE", fmt_date(d));
    }
    if events.is_empty() {
        return ctx.no_result(input);
    }
    named(&mut out, c);
    let list = events
        .iter()
        .map(|e| format!("{} {}", fmt_datetime(e.start), e.title))
        .collect::<Vec<_>>()
        .join("; ");
    out.set_slot("EVENT_LIST", list);
    vec![out]
}
