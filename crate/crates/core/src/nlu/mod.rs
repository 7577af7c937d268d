//! Statistical NLU: TF-IDF + linear classifier for intents, an HMM and an
//! embedding tagger for slots, and the rule-first pipeline combining them
//! with the template matcher.

pub mod dataset;
pub mod embedding;
pub mod hmm;
pub mod model_io;
pub mod svm;
pub mod tfidf;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::schema::SchemaRegistry;
use crate::state::{DialogueState, SlotValue};
use crate::template::{match_utterance, Direction, Template};
use crate::text::Utterance;

use dataset::{bio_spans, NluDataset};
use embedding::{CentroidClassifier, EmbeddingSlotTagger, EmbeddingTable};
use hmm::HmmSlotTagger;
use svm::{LinearIntentClassifier, SvmParams};
use tfidf::TfidfVectorizer;

pub const FALLBACK_INTENT: &str = "fallback";
pub const DEFAULT_THRESHOLD: f64 = 0.3;

#[derive(Debug, Error)]
pub enum NluError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("need at least two intent classes, found only {0:?}")]
    SingleClass(String),
    #[error("unknown tag {0:?}")]
    UnknownTag(String),
    #[error("vector has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("unsupported model format version {0}")]
    Version(u32),
}

/// Every trained ML model.
#[derive(Debug, Clone, PartialEq)]
pub struct MlModels<T: Scalar> {
    pub vectorizer: TfidfVectorizer<T>,
    pub svm: LinearIntentClassifier<T>,
    pub hmm: HmmSlotTagger<T>,
    pub centroid: CentroidClassifier<T>,
    pub slot_tagger: EmbeddingSlotTagger<T>,
}

const MODEL_FILES: [(&str, &str); 5] = [
    ("tfidf", "tfidf.model"),
    ("svm", "svm.model"),
    ("hmm", "hmm.model"),
    ("centroid", "centroid.model"),
    ("slot-tagger", "slot_tagger.model"),
];

impl<T: Scalar> MlModels<T> {
    pub fn train(
        train: &NluDataset,
        table: &EmbeddingTable<T>,
        params: &SvmParams,
    ) -> Result<Self, NluError> {
        let docs: Vec<&[String]> = train.instances.iter().map(|i| i.tokens.as_slice()).collect();
        let vectorizer = TfidfVectorizer::fit(&docs)?;
        let xs: Vec<_> = docs.iter().map(|d| vectorizer.transform(d)).collect();
        let labels: Vec<String> = train.instances.iter().map(|i| i.intent.clone()).collect();
        let svm = LinearIntentClassifier::train(&xs, &labels, vectorizer.dim(), params)?;
        Ok(MlModels {
            svm,
            vectorizer,
            hmm: HmmSlotTagger::train(&train.instances)?,
            centroid: CentroidClassifier::train(&train.instances, table)?,
            slot_tagger: EmbeddingSlotTagger::train(&train.instances, table)?,
        })
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), NluError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| NluError::Io(format!("{}: {e}", dir.display())))?;
        let [tf, sv, hm, ce, st] = MODEL_FILES;
        model_io::save_model(dir.join(tf.1), tf.0, &self.vectorizer)?;
        model_io::save_model(dir.join(sv.1), sv.0, &self.svm)?;
        model_io::save_model(dir.join(hm.1), hm.0, &self.hmm)?;
        model_io::save_model(dir.join(ce.1), ce.0, &self.centroid)?;
        model_io::save_model(dir.join(st.1), st.0, &self.slot_tagger)
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, NluError> {
        let dir = dir.as_ref();
        let [tf, sv, hm, ce, st] = MODEL_FILES;
        Ok(MlModels {
            vectorizer: model_io::load_model(dir.join(tf.1), tf.0)?,
            svm: model_io::load_model(dir.join(sv.1), sv.0)?,
            hmm: model_io::load_model(dir.join(hm.1), hm.0)?,
            centroid: model_io::load_model(dir.join(ce.1), ce.0)?,
            slot_tagger: model_io::load_model(dir.join(st.1), st.0)?,
        })
    }

    /// True when every model file exists in `dir`.
    pub fn present_in(dir: impl AsRef<Path>) -> bool {
        MODEL_FILES.iter().all(|(_, f)| dir.as_ref().join(f).is_file())
    }

    pub fn predict_intent(&self, tokens: &[String]) -> Option<(&str, T)> {
        let x = self.vectorizer.transform(tokens);
        if x.is_empty() {
            return None;
        }
        Some(self.svm.predict(&x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NluSource {
    Rule,
    Ml,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NluOutcome {
    pub state: DialogueState,
    pub source: NluSource,
    /// Matched rule template, for rule-based parses.
    pub template_id: Option<String>,
}

/// Rule templates first; on no match, the linear classifier for the intent
/// and the embedding tagger for slots.
#[derive(Debug, Clone)]
pub struct NluPipeline<T: Scalar> {
    rules: Vec<Template>,
    ml: Option<(MlModels<T>, EmbeddingTable<T>)>,
    pub threshold: f64,
}

impl<T: Scalar> NluPipeline<T> {
    pub fn new(rules: Vec<Template>) -> Self {
        NluPipeline {
            rules: rules
                .into_iter()
                .filter(|t| t.direction == Direction::Nlu)
                .collect(),
            ml: None,
            threshold: DEFAULT_THRESHOLD,
        }
    }

    pub fn with_models(mut self, models: MlModels<T>, table: EmbeddingTable<T>) -> Self {
        self.ml = Some((models, table));
        self
    }

    pub fn has_models(&self) -> bool {
        self.ml.is_some()
    }

    pub fn rules(&self) -> &[Template] {
        &self.rules
    }

    pub fn add_rules(&mut self, templates: impl IntoIterator<Item = Template>) {
        self.rules
            .extend(templates.into_iter().filter(|t| t.direction == Direction::Nlu));
    }

    pub fn parse(&self, utterance: &Utterance, registry: &SchemaRegistry) -> NluOutcome {
        if let Some(m) = match_utterance(&self.rules, utterance) {
            return NluOutcome {
                state: m.state,
                source: NluSource::Rule,
                template_id: Some(m.result.template_id),
            };
        }
        let fallback = |confidence: f64| {
            let mut state = DialogueState::input(
                registry
                    .domain_of(FALLBACK_INTENT)
                    .map(<[_]>::to_vec)
                    .unwrap_or_else(|| vec!["General".into(), "Fallback".into()]),
                FALLBACK_INTENT,
            );
            state.confidence = confidence.clamp(0.0, 1.0);
            state.turn_index = utterance.turn_index;
            NluOutcome {
                state,
                source: NluSource::Fallback,
                template_id: None,
            }
        };
        let Some((models, table)) = &self.ml else {
            return fallback(0.0);
        };
        let Some((intent, score)) = models.predict_intent(&utterance.tokens) else {
            return fallback(0.0);
        };
        let score = score.as_f64();
        let (Some(domain), Some(schema)) = (registry.domain_of(intent), registry.schema(intent))
        else {
            return fallback(score);
        };
        if score < self.threshold {
            return fallback(score);
        }
        let mut state = DialogueState::input(domain.to_vec(), intent);
        state.confidence = score.clamp(0.0, 1.0);
        state.turn_index = utterance.turn_index;
        let tags = models.slot_tagger.predict(table, &utterance.tokens);
        for (slot, start, end) in bio_spans(&tags) {
            let allowed = schema.required.contains(&slot) || schema.optional.contains(&slot);
            if allowed && !state.slots.contains_key(&slot) {
                let surface = utterance.tokens[start..end].join(" ");
                state.slots.insert(slot.clone(), SlotValue::new(slot, surface));
            }
        }
        NluOutcome {
            state,
            source: NluSource::Ml,
            template_id: None,
        }
    }
}
