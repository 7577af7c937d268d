use serde::{Deserialize, Serialize};

use crate::template::{Segment, Template, WILDCARD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionRule {
    WhQuestion,
    DetPhrase,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformativeExpression {
    pub segments: Vec<Segment>,
    pub rule: ExtractionRule,
    pub intent: String,
    pub domain_path: Vec<String>,
    pub source_template: String,
}

impl InformativeExpression {
    pub fn pattern(&self) -> String {
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
}

const WH_WORDS: [&str; 4] = ["where", "when", "which", "whose"];
const QUESTION_STARTS: [&str; 2] = ["what", "who"];
const DETERMINERS: [&str; 2] = ["the", "a"];

fn literal_is(seg: &Segment, words: &[&str]) -> bool {
    matches!(seg, Segment::Literal(t) if words.contains(&t.as_str()))
}

/// Rule (i): the suffix starting at the first where/when/which/whose.
/// Rule (ii): for templates starting with what/who, the phrase from the
/// first the/a to the end. Expressions containing a wildcard are dropped,
/// as are repeated patterns.
pub fn extract_informative_expressions(templates: &[Template]) -> Vec<InformativeExpression> {
    let mut out: Vec<InformativeExpression> = Vec::new();
    let mut push = |t: &Template, from: usize, rule: ExtractionRule| {
        let segments = t.segments[from..].to_vec();
        if segments.contains(&Segment::Wildcard) {
            return;
        }
        let expr = InformativeExpression {
            segments,
            rule,
            intent: t.intent.clone(),
            domain_path: t.domain_path.clone(),
            source_template: t.id.clone(),
        };
        if !out.iter().any(|e| e.segments == expr.segments) {
            out.push(expr);
        }
    };
    for t in templates {
        if let Some(i) = t.segments.iter().position(|s| literal_is(s, &WH_WORDS)) {
            push(t, i, ExtractionRule::WhQuestion);
        }
        if t.segments.first().is_some_and(|s| literal_is(s, &QUESTION_STARTS)) {
            if let Some(i) = t.segments.iter().position(|s| literal_is(s, &DETERMINERS)) {
                push(t, i, ExtractionRule::DetPhrase);
            }
        }
    }
    out
}
