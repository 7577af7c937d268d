use super::{join_names, SkillContext};
use crate::kb::{best_match, lookup_entity, normalize, PaperRecord};
use crate::state::{DialogueState, SlotValue};

fn paper<'a>(input: &DialogueState, ctx: &SkillContext<'a>) -> Option<&'a PaperRecord> {
    let id = lookup_entity(ctx.kb, "PAPER_TITLE", input.slot("PAPER_TITLE")?)?;
    ctx.kb.papers.iter().find(|p| p.id == id)
}

fn titled(out: &mut DialogueState, p: &PaperRecord) {
    out.slots.insert(
        "PAPER_TITLE".into(),
        SlotValue::new("PAPER_TITLE", p.title.clone()).with_canonical(p.id.clone()),
    );
}

/// Papers of a person: the person record's list plus every paper listing
/// the person as an author.
pub(super) fn papers_of<'a>(ctx: &SkillContext<'a>, name: &str) -> Vec<&'a PaperRecord> {
    let key = normalize(name);
    let listed: Vec<&str> = ctx
        .kb
        .people
        .iter()
        .filter(|p| normalize(&p.name) == key)
        .flat_map(|p| p.papers.iter().map(String::as_str))
        .collect();
    let mut out: Vec<&PaperRecord> = ctx
        .kb
        .papers
        .iter()
        .filter(|p| listed.contains(&p.id.as_str()) || p.authors.iter().any(|a| normalize(a) == key))
        .collect();
    out.sort_by(|a, b| b.year.cmp(&a.year).then_with(|| a.id.cmp(&b.id)));
    out
}

/// Canonical person name: a person record, else a matching paper author.
pub(super) fn person_name(ctx: &SkillContext, surface: &str) -> Option<String> {
    if let Some(n) = lookup_entity(ctx.kb, "PERSON_NAME", surface) {
        return Some(n);
    }
    let authors: Vec<&String> = ctx.kb.papers.iter().flat_map(|p| &p.authors).collect();
    best_match(authors.iter().map(|a| (a.as_str(), a.as_str(), 0)), surface).map(str::to_string)
}

pub fn metadata(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    let mut out = ctx.respond(input, &input.intent);
    if input.intent == "give-title" {
        let Some(name) = input.slot("PERSON_NAME").and_then(|s| person_name(ctx, s)) else {
            return ctx.no_result(input);
        };
        let year = input.slot("YEAR");
        let venue = input.slot("VENUE").map(normalize);
        let found = papers_of(ctx, &name).into_iter().find(|p| {
            year.is_none_or(|y| p.year.to_string() == y)
                && venue.as_ref().is_none_or(|v| normalize(&p.venue) == *v)
        });
        let Some(p) = found else {
            return ctx.no_result(input);
        };
        out.set_slot("PERSON_NAME", name);
        titled(&mut out, p);
        return vec![out];
    }

    let Some(p) = paper(input, ctx) else {
        return ctx.no_result(input);
    };
    titled(&mut out, p);
    let answer = match input.intent.as_str() {
        "give-authors" => Some(("AUTHORS", join_names(&p.authors))),
        "give-year" => Some(("YEAR", p.year.to_string())),
        "give-venue" => {
            out.set_slot("YEAR", p.year.to_string());
            Some(("VENUE", p.venue.clone()))
        }
        "give-bib" => Some(("BIB", p.bib.clone())),
        "give-citations" => p.citations.map(|c| ("CITATIONS", c.to_string())),
        "give-url" => Some(("URL", p.url.clone())),
        "give-abstract" => Some(("ABSTRACT", p.abstract_text.clone())),
        "give-figures" => (!p.figures.is_empty()).then(|| ("FIGURES", p.figures.join("; "))),
        _ => None,
    };
    match answer {
        Some((slot, value)) if !value.trim().is_empty() => {
            out.set_slot(slot, value);
            vec![out]
        }
        _ => ctx.no_result(input),
    }
}

pub fn discourse(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    let Some(p) = paper(input, ctx) else {
        return ctx.no_result(input);
    };
    let mut out = ctx.respond(input, &input.intent);
    titled(&mut out, p);
    match input.intent.as_str() {
        "give-conclusion" => match &p.conclusion {
            Some(c) => out.set_slot("CONCLUSION", c.clone()),
            None => return ctx.no_result(input),
        },
        "give-section" => {
            let wanted = input.slot("SECTION_NAME").map(normalize).unwrap_or_default();
            let hit = p.sections.iter().find(|(name, _)| normalize(name) == wanted);
            match hit {
                Some((name, text)) => {
                    out.set_slot("SECTION_NAME", name.clone());
                    out.set_slot("SECTION_TEXT", text.clone());
                }
                None => return ctx.no_result(input),
            }
        }
        _ => return ctx.no_result(input),
    }
    vec![out]
}
