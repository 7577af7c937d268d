use super::paper::{papers_of, person_name};
use super::{fmt_date, SkillContext};
use crate::kb::{normalize, NewsItem};
use crate::state::DialogueState;

pub const LATEST_NEWS: usize = 3;

pub fn people(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    let Some(name) = input.slot("PERSON_NAME").and_then(|s| person_name(ctx, s)) else {
        return ctx.no_result(input);
    };
    let record = ctx.kb.people.iter().find(|p| p.name == name);
    let answer = match input.intent.as_str() {
        "give-h-index" => record.and_then(|r| r.h_index).map(|h| ("H_INDEX", h.to_string())),
        "give-affiliation" => record.and_then(|r| r.affiliation.clone()).map(|a| ("AFFILIATION", a)),
        "give-papers-of-person" => {
            let papers = papers_of(ctx, &name);
            (!papers.is_empty()).then(|| {
                let list = papers
                    .iter()
                    .map(|p| format!("\"{}\" ({})", p.title, p.year))
                    .collect::<Vec<_>>()
                    .join("; ");
                ("PAPERS", list)
            })
        }
        _ => None,
    };
    let Some((slot, value)) = answer else {
        return ctx.no_result(input);
    };
    let mut out = ctx.respond(input, &input.intent);
    out.set_slot("PERSON_NAME", name);
    out.set_slot(slot, value);
    vec![out]
}

fn about(item: &NewsItem, topic: &[String]) -> bool {
    let has = |hay: &[String]| hay.windows(topic.len()).any(|w| w == topic);
    item.topics.iter().any(|t| {
        let t = normalize(t);
        t == topic || has(&t) || (!t.is_empty() && topic.windows(t.len()).any(|w| w == t.as_slice()))
    }) || has(&normalize(&item.headline))
}

pub fn news(input: &DialogueState, ctx: &SkillContext) -> Vec<DialogueState> {
    let mut items: Vec<&NewsItem> = ctx.kb.news.iter().collect();
    items.sort_by(|a, b| b.date.cmp(&a.date).then_with(|| a.headline.cmp(&b.headline)));
    let mut out = ctx.respond(input, &input.intent);
    if input.intent == "give-news-on-topic" {
        let topic = input.slot("NEWS_TOPIC").map(normalize).unwrap_or_default();
        if topic.is_empty() {
            return ctx.no_result(input);
        }
        items.retain(|i| about(i, &topic));
        out.set_slot("NEWS_TOPIC", input.slot("NEWS_TOPIC").unwrap_or_default());
    }
    items.truncate(LATEST_NEWS);
    if items.is_empty() {
        return ctx.no_result(input);
    }
    let list = items
        .iter()
        .map(|i| format!("{} ({})", i.headline, fmt_date(i.date)))
        .collect::<Vec<_>>()
        .join("; ");
    out.set_slot("NEWS_LIST", list);
    vec![out]
}
