use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    augment_templates, extract_informative_expressions, extract_top_ngrams, instantiate_templates,
    sample_in_order, AugmentError, SlotVocab,
};
use crate::nlu::dataset::{Instance, NluDataset, Split};
use crate::schema::SchemaRegistry;
use crate::template::{load_template_files, Template};

fn default_top_ngrams() -> usize {
    74
}

fn default_instances() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub seed: u64,
    pub corpora: Vec<PathBuf>,
    pub templates: Vec<PathBuf>,
    pub schema: PathBuf,
    pub slot_vocab: PathBuf,
    #[serde(default = "default_top_ngrams")]
    pub top_ngrams: usize,
    /// Human templates assigned to the training split.
    pub train_templates: usize,
    #[serde(default)]
    pub max_added_train: Option<usize>,
    #[serde(default)]
    pub max_added_test: Option<usize>,
    #[serde(default = "default_instances")]
    pub instances_per_template: usize,
}

impl PipelineConfig {
    /// Loads the config; relative paths are resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, AugmentError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| AugmentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).map_err(|e| AugmentError::Config(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.corpora.iter_mut().for_each(fix);
        cfg.templates.iter_mut().for_each(fix);
        fix(&mut cfg.schema);
        fix(&mut cfg.slot_vocab);
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub test: usize,
}

/// The three dataset rows: human templates, added templates, instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub human_templates: SplitCounts,
    pub added_templates: SplitCounts,
    pub instances: SplitCounts,
}

impl DatasetStats {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("stats serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self, AugmentError> {
        toml::from_str(text).map_err(|e| AugmentError::Config(e.to_string()))
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28}{:>8}{:>8}", "", "train", "test")?;
        for (name, c) in [
            ("# of human templates", self.human_templates),
            ("# of added templates", self.added_templates),
            ("# of instances", self.instances),
        ] {
            writeln!(f, "{:<28}{:>8}{:>8}", name, c.train, c.test)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltDataset {
    pub train: NluDataset,
    pub test: NluDataset,
    pub stats: DatasetStats,
    pub train_templates: Vec<Template>,
    pub test_templates: Vec<Template>,
}

impl BuiltDataset {
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<(), AugmentError> {
        let dir = dir.as_ref();
        let io = |source| AugmentError::Io {
            path: dir.display().to_string(),
            source,
        };
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join("train.tsv"), self.train.to_text()).map_err(io)?;
        std::fs::write(dir.join("test.tsv"), self.test.to_text()).map_err(io)?;
        std::fs::write(dir.join("stats.toml"), self.stats.to_toml()).map_err(io)
    }
}

fn stage_rng(seed: u64, stage: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage);
    rng
}

/// Seeded split stratified by intent: each intent contributes its share of
/// `train_count`, rounded by largest remainder (ties to the smaller intent
/// name). Both halves keep the input order.
pub fn split_templates(
    templates: &[Template],
    train_count: usize,
    seed: u64,
) -> Result<(Vec<Template>, Vec<Template>), AugmentError> {
    let total = templates.len();
    if train_count > total {
        return Err(AugmentError::Config(format!(
            "train_templates = {train_count} exceeds the {total} available templates"
        )));
    }
    let mut by_intent: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, t) in templates.iter().enumerate() {
        by_intent.entry(&t.intent).or_default().push(i);
    }
    let mut quota: BTreeMap<&str, usize> = BTreeMap::new();
    let mut remainders: Vec<(usize, &str)> = Vec::new();
    for (intent, idx) in &by_intent {
        let exact = idx.len() * train_count;
        quota.insert(intent, exact / total.max(1));
        remainders.push((exact % total.max(1), intent));
    }
    let assigned: usize = quota.values().sum();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
    for (_, intent) in remainders.into_iter().take(train_count - assigned) {
        *quota.get_mut(intent).expect("intent has a quota") += 1;
    }

    let mut rng = stage_rng(seed, 1);
    let mut in_train = vec![false; total];
    for (intent, mut idx) in by_intent {
        idx.shuffle(&mut rng);
        for &i in idx.iter().take(quota[intent]) {
            in_train[i] = true;
        }
    }
    let (train, test): (Vec<_>, Vec<_>) = templates
        .iter()
        .cloned()
        .zip(in_train)
        .partition(|(_, tr)| *tr);
    Ok((
        train.into_iter().map(|p| p.0).collect(),
        test.into_iter().map(|p| p.0).collect(),
    ))
}

fn dedup_instances(instances: Vec<Instance>, banned: &BTreeSet<String>) -> Vec<Instance> {
    let mut seen = banned.clone();
    instances
        .into_iter()
        .filter(|i| seen.insert(i.text()))
        .collect()
}

/// Runs the whole construction. The output is a pure function of the config
/// (including its seed).
pub fn build_dataset(config: &PipelineConfig) -> Result<BuiltDataset, AugmentError> {
    let registry = SchemaRegistry::load(&config.schema)?;
    let vocab_text = std::fs::read_to_string(&config.slot_vocab).map_err(|source| AugmentError::Io {
        path: config.slot_vocab.display().to_string(),
        source,
    })?;
    let vocab: SlotVocab = toml::from_str(&vocab_text).map_err(|e| AugmentError::Config(e.to_string()))?;

    let human = load_template_files(&config.templates, &registry)?;
    let (train_h, test_h) = split_templates(&human, config.train_templates, config.seed)?;
    let prefixes = extract_top_ngrams(&config.corpora, config.top_ngrams)?;

    let human_patterns: BTreeSet<String> = human.iter().map(Template::canonical_pattern).collect();
    let fresh = |ts: Vec<Template>, banned: &BTreeSet<String>| -> Vec<Template> {
        ts.into_iter()
            .filter(|t| !banned.contains(&t.canonical_pattern()))
            .collect()
    };

    let train_cands = fresh(
        augment_templates(&prefixes, &extract_informative_expressions(&train_h), "aug-train", &registry),
        &human_patterns,
    );
    let train_added = sample_in_order(
        &train_cands,
        config.max_added_train.unwrap_or(usize::MAX),
        &mut stage_rng(config.seed, 2),
    );

    let mut train_patterns = human_patterns.clone();
    train_patterns.extend(train_added.iter().map(Template::canonical_pattern));
    let test_cands = fresh(
        augment_templates(&prefixes, &extract_informative_expressions(&test_h), "aug-test", &registry),
        &train_patterns,
    );
    let test_added = sample_in_order(
        &test_cands,
        config.max_added_test.unwrap_or(usize::MAX),
        &mut stage_rng(config.seed, 3),
    );

    let train_templates: Vec<Template> = train_h.iter().chain(&train_added).cloned().collect();
    let test_templates: Vec<Template> = test_h.iter().chain(&test_added).cloned().collect();
    let cap = config.instances_per_template;
    let train_inst = dedup_instances(
        instantiate_templates(&train_templates, &vocab, cap, &mut stage_rng(config.seed, 4))?,
        &BTreeSet::new(),
    );
    let train_texts: BTreeSet<String> = train_inst.iter().map(Instance::text).collect();
    let test_inst = dedup_instances(
        instantiate_templates(&test_templates, &vocab, cap, &mut stage_rng(config.seed, 5))?,
        &train_texts,
    );

    let stats = DatasetStats {
        human_templates: SplitCounts {
            train: train_h.len(),
            test: test_h.len(),
        },
        added_templates: SplitCounts {
            train: train_added.len(),
            test: test_added.len(),
        },
        instances: SplitCounts {
            train: train_inst.len(),
            test: test_inst.len(),
        },
    };
    log::info!(
        "dataset: {} prefixes, {} train / {} test candidates\n{stats}",
        prefixes.len(),
        train_cands.len(),
        test_cands.len()
    );
    Ok(BuiltDataset {
        train: NluDataset::new(Split::Train, train_inst),
        test: NluDataset::new(Split::Test, test_inst),
        stats,
        train_templates,
        test_templates,
    })
}
