use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Direction, Segment, Template};
use crate::state::{DialogueState, SlotValue};
use crate::text::Utterance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub template_id: String,
    /// Slot name to captured surface text (tokens joined by a space).
    pub captured: BTreeMap<String, String>,
    /// Half-open token span of each capture.
    pub spans: BTreeMap<String, (usize, usize)>,
    pub literal_count: usize,
    pub wildcard_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub result: MatchResult,
    pub state: DialogueState,
}

/// Anchored match of one template against a token sequence.
///
/// Placeholders consume at least one token and wildcards zero or more. When
/// several span assignments fit, the one whose capture lengths are
/// lexicographically smallest (earlier segments as short as possible) is
/// returned. Returns the span of every non-literal segment, in order.
pub fn match_template(template: &Template, tokens: &[String]) -> Option<Vec<(usize, usize)>> {
    let mut dead: HashSet<(usize, usize)> = HashSet::new();
    let mut spans = Vec::new();
    if walk(&template.segments, tokens, 0, 0, &mut spans, &mut dead) {
        Some(spans)
    } else {
        None
    }
}

fn walk(
    segments: &[Segment],
    tokens: &[String],
    seg: usize,
    pos: usize,
    spans: &mut Vec<(usize, usize)>,
    dead: &mut HashSet<(usize, usize)>,
) -> bool {
    if seg == segments.len() {
        return pos == tokens.len();
    }
    if dead.contains(&(seg, pos)) {
        return false;
    }
    let found = match &segments[seg] {
        Segment::Literal(lit) => {
            pos < tokens.len()
                && tokens[pos] == *lit
                && walk(segments, tokens, seg + 1, pos + 1, spans, dead)
        }
        slot_or_wild => {
            let min = usize::from(matches!(slot_or_wild, Segment::Slot(_)));
            let mut ok = false;
            for end in pos + min..=tokens.len() {
                spans.push((pos, end));
                if walk(segments, tokens, seg + 1, end, spans, dead) {
                    ok = true;
                    break;
                }
                spans.pop();
            }
            ok
        }
    };
    if !found {
        dead.insert((seg, pos));
    }
    found
}

fn rank_key(t: &Template) -> (std::cmp::Reverse<usize>, usize, &str) {
    (std::cmp::Reverse(t.literal_count()), t.wildcard_count(), t.id.as_str())
}

/// Best whole-utterance match among the NLU templates.
///
/// Ranking: most literal tokens, then fewest wildcards, then smallest
/// template id. The order of `templates` does not matter.
pub fn match_utterance(templates: &[Template], utterance: &Utterance) -> Option<Match> {
    let mut order: Vec<&Template> = templates
        .iter()
        .filter(|t| t.direction == Direction::Nlu)
        .collect();
    order.sort_by(|a, b| rank_key(a).cmp(&rank_key(b)));

    order.into_iter().find_map(|t| {
        let spans = match_template(t, &utterance.tokens)?;
        Some(build_match(t, utterance, &spans))
    })
}

fn build_match(t: &Template, utterance: &Utterance, spans: &[(usize, usize)]) -> Match {
    let mut captured = BTreeMap::new();
    let mut slot_spans = BTreeMap::new();
    let mut state = DialogueState::input(t.domain_path.clone(), t.intent.clone());
    state.turn_index = utterance.turn_index;

    let non_literal = t.segments.iter().filter(|s| !s.is_literal());
    for (seg, &(start, end)) in non_literal.zip(spans) {
        if let Segment::Slot(name) = seg {
            let surface = utterance.tokens[start..end].join(" ");
            state
                .slots
                .insert(name.clone(), SlotValue::new(name.clone(), surface.clone()));
            captured.insert(name.clone(), surface);
            slot_spans.insert(name.clone(), (start, end));
        }
    }
    Match {
        result: MatchResult {
            template_id: t.id.clone(),
            captured,
            spans: slot_spans,
            literal_count: t.literal_count(),
            wildcard_count: t.wildcard_count(),
        },
        state,
    }
}
