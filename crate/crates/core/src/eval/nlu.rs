use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::nlu::dataset::{bio_spans, NluDataset, Split};
use crate::nlu::embedding::EmbeddingTable;
use crate::nlu::MlModels;
use crate::scalar::Scalar;

/// One row of the metrics table; `None` where a model does not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub model: String,
    pub intent_accuracy: Option<f64>,
    pub slot_accuracy: Option<f64>,
    /// Exact-match span F1, reported next to token accuracy.
    pub slot_span_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NluReport {
    pub train_instances: usize,
    pub test_instances: usize,
    pub rows: Vec<MetricRow>,
}

pub const RANDOM: &str = "Random baseline";
pub const MAJORITY: &str = "Majority baseline";
pub const HMM: &str = "HMM";
pub const SVM: &str = "TF-IDF + linear SVM";
pub const EMBEDDING: &str = "Embedding average";

impl NluReport {
    pub fn row(&self, model: &str) -> Option<&MetricRow> {
        self.rows.iter().find(|r| r.model == model)
    }
}

impl fmt::Display for NluReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"));
        writeln!(f, "{:<22}{:>10}{:>10}{:>10}", "Model", "Intent", "Slot", "Span F1")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<22}{:>10}{:>10}{:>10}",
                r.model,
                cell(r.intent_accuracy),
                cell(r.slot_accuracy),
                cell(r.slot_span_f1)
            )?;
        }
        Ok(())
    }
}

fn percent(hit: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * hit as f64 / total as f64
    }
}

fn most_frequent<'a>(items: impl Iterator<Item = &'a String>) -> Option<&'a String> {
    let mut counts: BTreeMap<&String, usize> = BTreeMap::new();
    for i in items {
        *counts.entry(i).or_default() += 1;
    }
    let mut best: Option<(&String, usize)> = None;
    for (k, n) in counts {
        if best.is_none_or(|b| n > b.1) {
            best = Some((k, n));
        }
    }
    best.map(|b| b.0)
}

struct SlotScore {
    token_hits: usize,
    tokens: usize,
    gold_spans: usize,
    pred_spans: usize,
    span_hits: usize,
}

impl SlotScore {
    fn new() -> Self {
        SlotScore {
            token_hits: 0,
            tokens: 0,
            gold_spans: 0,
            pred_spans: 0,
            span_hits: 0,
        }
    }

    fn add(&mut self, gold: &[String], pred: &[String]) {
        self.tokens += gold.len();
        self.token_hits += gold.iter().zip(pred).filter(|(g, p)| g == p).count();
        let g: BTreeSet<_> = bio_spans(gold).into_iter().collect();
        let p: BTreeSet<_> = bio_spans(pred).into_iter().collect();
        self.gold_spans += g.len();
        self.pred_spans += p.len();
        self.span_hits += g.intersection(&p).count();
    }

    fn accuracy(&self) -> f64 {
        percent(self.token_hits, self.tokens)
    }

    fn f1(&self) -> f64 {
        if self.span_hits == 0 {
            return 0.0;
        }
        let p = self.span_hits as f64 / self.pred_spans as f64;
        let r = self.span_hits as f64 / self.gold_spans as f64;
        100.0 * 2.0 * p * r / (p + r)
    }
}

/// Accuracy table of the random and majority baselines and every ML model
/// on `test`. The random baseline is the analytic expectation `1 / |labels|`.
pub fn evaluate_nlu<T: Scalar>(
    models: &MlModels<T>,
    table: &EmbeddingTable<T>,
    train: &NluDataset,
    test: &NluDataset,
) -> Result<NluReport, EvalError> {
    if train.split != Split::Train || test.split != Split::Test {
        return Err(EvalError::SplitMismatch);
    }
    if test.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let n = test.len();

    let major_intent = most_frequent(train.instances.iter().map(|i| &i.intent));
    let major_tag = most_frequent(train.instances.iter().flat_map(|i| &i.tags));
    let mut major_slots = SlotScore::new();
    let mut intent_hits = BTreeMap::from([(MAJORITY, 0usize), (SVM, 0), (EMBEDDING, 0)]);
    let mut hmm = SlotScore::new();
    let mut emb = SlotScore::new();

    for inst in &test.instances {
        if Some(&inst.intent) == major_intent {
            *intent_hits.get_mut(MAJORITY).unwrap() += 1;
        }
        let majority_tags: Vec<String> = inst
            .tags
            .iter()
            .map(|_| major_tag.cloned().unwrap_or_default())
            .collect();
        major_slots.add(&inst.tags, &majority_tags);

        let x = models.vectorizer.transform(&inst.tokens);
        if models.svm.predict(&x).0 == inst.intent {
            *intent_hits.get_mut(SVM).unwrap() += 1;
        }
        if models.centroid.predict(table, &inst.tokens).0 == inst.intent {
            *intent_hits.get_mut(EMBEDDING).unwrap() += 1;
        }
        hmm.add(&inst.tags, &models.hmm.viterbi_decode(&inst.tokens));
        emb.add(&inst.tags, &models.slot_tagger.predict(table, &inst.tokens));
    }

    let rows = vec![
        MetricRow {
            model: RANDOM.into(),
            intent_accuracy: Some(100.0 / models.svm.classes.len() as f64),
            slot_accuracy: Some(100.0 / models.hmm.states.len() as f64),
            slot_span_f1: None,
        },
        MetricRow {
            model: MAJORITY.into(),
            intent_accuracy: Some(percent(intent_hits[MAJORITY], n)),
            slot_accuracy: Some(major_slots.accuracy()),
            slot_span_f1: None,
        },
        MetricRow {
            model: HMM.into(),
            intent_accuracy: None,
            slot_accuracy: Some(hmm.accuracy()),
            slot_span_f1: Some(hmm.f1()),
        },
        MetricRow {
            model: SVM.into(),
            intent_accuracy: Some(percent(intent_hits[SVM], n)),
            slot_accuracy: None,
            slot_span_f1: None,
        },
        MetricRow {
            model: EMBEDDING.into(),
            intent_accuracy: Some(percent(intent_hits[EMBEDDING], n)),
            slot_accuracy: Some(emb.accuracy()),
            slot_span_f1: Some(emb.f1()),
        },
    ];
    Ok(NluReport {
        train_instances: train.len(),
        test_instances: n,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlu::dataset::Instance;
    use crate::nlu::svm::SvmParams;

    fn inst(text: &str, intent: &str) -> Instance {
        let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        Instance {
            tags: vec!["O".into(); tokens.len()],
            tokens,
            intent: intent.into(),
            template_id: String::new(),
        }
    }

    fn table() -> EmbeddingTable<f64> {
        EmbeddingTable::from_text("a 1 0\nb 0 1\n").unwrap()
    }

    #[test]
    fn baselines() {
        let train = NluDataset::new(Split::Train, vec![inst("a", "x"), inst("a a", "x"), inst("b", "y")]);
        let test = NluDataset::new(Split::Test, vec![inst("a", "x"), inst("b", "y")]);
        let models = MlModels::train(&train, &table(), &SvmParams::default()).unwrap();
        let report = evaluate_nlu(&models, &table(), &train, &test).unwrap();
        assert_eq!(report.row(RANDOM).unwrap().intent_accuracy, Some(50.0));
        assert_eq!(report.row(MAJORITY).unwrap().intent_accuracy, Some(50.0));
        assert_eq!(report.row(MAJORITY).unwrap().slot_accuracy, Some(100.0));
        assert_eq!(report.row(SVM).unwrap().intent_accuracy, Some(100.0));
        assert_eq!(report.row(HMM).unwrap().intent_accuracy, None);
        assert!(report.to_string().contains("-"));
    }

    #[test]
    fn one_intent_majority_is_perfect() {
        let mut ds: Vec<Instance> = vec![inst("a", "x"), inst("b", "x")];
        let test = NluDataset::new(Split::Test, ds.clone());
        ds.push(inst("a b", "y"));
        ds.push(inst("a b", "x"));
        let train = NluDataset::new(Split::Train, ds);
        let models = MlModels::train(&train, &table(), &SvmParams::default()).unwrap();
        let report = evaluate_nlu(&models, &table(), &train, &test).unwrap();
        assert_eq!(report.row(MAJORITY).unwrap().intent_accuracy, Some(100.0));
        assert!(matches!(
            evaluate_nlu(&models, &table(), &test, &train),
            Err(EvalError::SplitMismatch)
        ));
    }
}
