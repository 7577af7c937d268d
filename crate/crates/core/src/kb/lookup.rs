use chrono::Datelike;

use super::records::EventKind;
use super::KbSnapshot;
use crate::text::tokenize;

/// Lowercased alphanumeric tokens; punctuation is dropped.
pub fn normalize(s: &str) -> Vec<String> {
    tokenize(s)
        .into_iter()
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .collect()
}

fn contains_run(hay: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && hay.windows(needle.len()).any(|w| w == needle)
}

struct Candidate<'a> {
    id: &'a str,
    name: &'a str,
    year: i32,
}

fn candidates<'a>(kb: &'a KbSnapshot, slot_type: &str) -> Vec<Candidate<'a>> {
    let events = |kind: Option<EventKind>| -> Vec<Candidate<'a>> {
        kb.events
            .iter()
            .filter(|e| kind.is_none_or(|k| e.kind == k))
            .map(|e| Candidate {
                id: &e.id,
                name: &e.title,
                year: e.start.year(),
            })
            .collect()
    };
    match slot_type {
        "PAPER_TITLE" => kb
            .papers
            .iter()
            .map(|p| Candidate {
                id: &p.id,
                name: &p.title,
                year: p.year,
            })
            .collect(),
        "PERSON_NAME" => kb
            .people
            .iter()
            .map(|p| Candidate {
                id: &p.name,
                name: &p.name,
                year: 0,
            })
            .collect(),
        "CONF_NAME" => kb
            .conferences
            .iter()
            .map(|c| Candidate {
                id: &c.id,
                name: &c.name,
                year: c.year,
            })
            .collect(),
        "KEYNOTE_TITLE" => events(Some(EventKind::Keynote)),
        "TUTORIAL_TITLE" => events(Some(EventKind::Tutorial)),
        "EVENT_NAME" => events(None),
        _ => vec![],
    }
}

/// Canonical id of the entity `surface` refers to.
///
/// An exact match of the normalized text wins. Otherwise a candidate
/// matches when either token sequence contains the other as a contiguous
/// run; among several, the most recent year and then the smallest id win.
pub fn lookup_entity(kb: &KbSnapshot, slot_type: &str, surface: &str) -> Option<String> {
    best_match(
        candidates(kb, slot_type).iter().map(|c| (c.id, c.name, c.year)),
        surface,
    )
    .map(str::to_string)
}

/// [`lookup_entity`] over an explicit `(id, name, year)` candidate list.
pub fn best_match<'a>(
    candidates: impl IntoIterator<Item = (&'a str, &'a str, i32)>,
    surface: &str,
) -> Option<&'a str> {
    let query = normalize(surface);
    if query.is_empty() {
        return None;
    }
    let cands: Vec<(&str, Vec<String>, i32)> = candidates
        .into_iter()
        .map(|(id, name, year)| (id, normalize(name), year))
        .collect();
    let best = |pred: &dyn Fn(&[String]) -> bool| {
        cands
            .iter()
            .filter(|c| pred(&c.1))
            .min_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(b.0)))
            .map(|c| c.0)
    };
    best(&|name| name == query.as_slice())
        .or_else(|| best(&|name| contains_run(name, &query) || contains_run(&query, name)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::records::PaperRecord;
    use chrono::Utc;

    fn paper(id: &str, title: &str, year: i32) -> PaperRecord {
        PaperRecord {
            id: id.into(),
            title: title.into(),
            authors: vec![],
            year,
            venue: String::new(),
            abstract_text: String::new(),
            conclusion: None,
            sections: Default::default(),
            citations: None,
            figures: vec![],
            url: String::new(),
            bib: String::new(),
        }
    }

    fn kb() -> KbSnapshot {
        let mut kb = KbSnapshot::empty(Utc::now());
        kb.papers = vec![
            paper("b-2015", "Effective Approaches to Attention-based Neural Machine Translation", 2015),
            paper("a-2017", "Attention Is All You Need", 2017),
            paper("c-2017", "Attention Models", 2017),
        ];
        kb
    }

    #[test]
    fn exact_beats_containment() {
        assert_eq!(lookup_entity(&kb(), "PAPER_TITLE", "attention models").as_deref(), Some("c-2017"));
        assert_eq!(
            lookup_entity(&kb(), "PAPER_TITLE", "ATTENTION IS ALL YOU NEED").as_deref(),
            Some("a-2017")
        );
    }

    #[test]
    fn containment_ties_go_to_newest_then_smallest_id() {
        assert_eq!(lookup_entity(&kb(), "PAPER_TITLE", "attention").as_deref(), Some("a-2017"));
        let mut older = kb();
        older.papers.retain(|p| p.year == 2015);
        older.papers.push(paper("z-2012", "Attention Early", 2012));
        assert_eq!(lookup_entity(&older, "PAPER_TITLE", "attention").as_deref(), Some("b-2015"));
    }

    #[test]
    fn query_may_contain_the_name() {
        assert_eq!(
            lookup_entity(&kb(), "PAPER_TITLE", "the paper attention is all you need please").as_deref(),
            Some("a-2017")
        );
    }

    #[test]
    fn misses() {
        assert_eq!(lookup_entity(&kb(), "PAPER_TITLE", "bert"), None);
        assert_eq!(lookup_entity(&kb(), "PAPER_TITLE", "?!"), None);
        assert_eq!(lookup_entity(&kb(), "VENUE", "attention"), None);
        assert_eq!(lookup_entity(&KbSnapshot::empty(Utc::now()), "CONF_NAME", "acl 2020"), None);
    }
}
