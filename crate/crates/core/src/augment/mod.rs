//! Training-data construction: frequent conversational n-grams from
//! dialogue corpora are prepended to informative expressions cut from the
//! human templates, and every template is instantiated with concrete slot
//! values to give labeled utterances.

mod expressions;
mod ngrams;
mod pipeline;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use thiserror::Error;

use crate::nlu::dataset::{tags_from_spans, Instance};
use crate::template::{compile_template, Direction, SlotCatalog, Template, TemplateLabels};
use crate::text::tokenize;

pub use expressions::{extract_informative_expressions, ExtractionRule, InformativeExpression};
pub use ngrams::{extract_top_ngrams, top_ngrams, NgramPrefix};
pub use pipeline::{build_dataset, split_templates, BuiltDataset, DatasetStats, PipelineConfig, SplitCounts};

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("no vocabulary for slot {0:?}")]
    MissingVocabulary(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Schema(#[from] crate::schema::SchemaError),
    #[error(transparent)]
    Templates(#[from] crate::template::TemplateFileError),
}

/// Slot name to candidate surface values.
pub type SlotVocab = BTreeMap<String, Vec<String>>;

/// Every `prefix + expression` concatenation compiled as an augmented NLU
/// template labeled with the expression's intent. Candidates that fail to
/// compile are skipped; repeated patterns are kept once.
pub fn augment_templates(
    prefixes: &[NgramPrefix],
    expressions: &[InformativeExpression],
    id_prefix: &str,
    catalog: &dyn SlotCatalog,
) -> Vec<Template> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (ei, expr) in expressions.iter().enumerate() {
        for (pi, prefix) in prefixes.iter().enumerate() {
            let pattern = format!("{} {}", prefix.text(), expr.pattern());
            let labels = TemplateLabels::new(
                &format!("{id_prefix}:{ei:03}:{pi:02}"),
                Direction::Nlu,
                expr.domain_path.clone(),
                &expr.intent,
            )
            .augmented();
            match compile_template(&pattern, labels, catalog) {
                Ok(t) => {
                    if seen.insert(t.canonical_pattern()) {
                        out.push(t);
                    }
                }
                Err(e) => log::warn!("skipping augmented candidate {pattern:?}: {e}"),
            }
        }
    }
    out
}

/// Expands each template with up to `cap` distinct slot assignments drawn
/// from `vocab` (a template without placeholders yields one instance). BIO
/// tags follow the placeholder spans.
pub fn instantiate_templates<R: Rng>(
    templates: &[Template],
    vocab: &SlotVocab,
    cap: usize,
    rng: &mut R,
) -> Result<Vec<Instance>, AugmentError> {
    let tokenized: BTreeMap<&str, Vec<Vec<String>>> = vocab
        .iter()
        .map(|(k, vs)| (k.as_str(), vs.iter().map(|v| tokenize(v)).filter(|t| !t.is_empty()).collect()))
        .collect();
    let mut out = Vec::new();
    for t in templates {
        let slots: Vec<&str> = t.placeholders().collect();
        let mut choices: Vec<&Vec<Vec<String>>> = Vec::with_capacity(slots.len());
        for s in &slots {
            match tokenized.get(s) {
                Some(v) if !v.is_empty() => choices.push(v),
                _ => return Err(AugmentError::MissingVocabulary(s.to_string())),
            }
        }
        let combos = choices
            .iter()
            .fold(1usize, |acc, c| acc.saturating_mul(c.len()));
        let wanted = cap.max(1).min(combos);
        let mut picked: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut order: Vec<Vec<usize>> = Vec::new();
        let mut attempts = 0;
        while order.len() < wanted && attempts < wanted * 50 {
            attempts += 1;
            let pick: Vec<usize> = choices.iter().map(|c| rng.random_range(0..c.len())).collect();
            if picked.insert(pick.clone()) {
                order.push(pick);
            }
        }
        for pick in order {
            let values: BTreeMap<String, Vec<String>> = slots
                .iter()
                .zip(&pick)
                .zip(&choices)
                .map(|((s, &i), c)| (s.to_string(), c[i].clone()))
                .collect();
            let (tokens, spans) = t
                .instantiate_tokens(&values)
                .expect("every placeholder has a value");
            out.push(Instance {
                tags: tags_from_spans(tokens.len(), &spans),
                tokens,
                intent: t.intent.clone(),
                template_id: t.id.clone(),
            });
        }
    }
    Ok(out)
}

/// Uniform sample of `k` items, returned in their original order.
pub(crate) fn sample_in_order<T: Clone, R: Rng>(items: &[T], k: usize, rng: &mut R) -> Vec<T> {
    if k >= items.len() {
        return items.to_vec();
    }
    let idx: Vec<usize> = (0..items.len()).collect();
    let mut chosen: Vec<usize> = idx.choose_multiple(rng, k).copied().collect();
    chosen.sort_unstable();
    chosen.into_iter().map(|i| items[i].clone()).collect()
}
