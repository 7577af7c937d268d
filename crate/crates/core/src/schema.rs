//! Domain/intent/slot registry loaded from the schema configuration file.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ROOT: &str = "Master";

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("reading schema {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing schema: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("node {0:?} listed before its parent")]
    MissingParent(String),
    #[error("duplicate domain node {0:?}")]
    DuplicateNode(String),
    #[error("intent {intent:?} owned by both {first:?} and {second:?}")]
    DuplicateIntent {
        intent: String,
        first: String,
        second: String,
    },
    #[error("intent {intent:?} references undeclared slot {slot:?}")]
    UnknownSlot { intent: String, slot: String },
    #[error("slot name {0:?} declared as both input and answer slot")]
    SlotClash(String),
}

/// Slot schema of one intent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntentConfig {
    pub name: String,
    #[serde(default)]
    pub required: Vec<String>,
    #[serde(default)]
    pub optional: Vec<String>,
    /// Response-only value keys.
    #[serde(default)]
    pub answers: Vec<String>,
}

impl IntentConfig {
    pub fn new(name: &str) -> Self {
        IntentConfig {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn required(mut self, slots: &[&str]) -> Self {
        self.required = slots.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn optional(mut self, slots: &[&str]) -> Self {
        self.optional = slots.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn answers(mut self, slots: &[&str]) -> Self {
        self.answers = slots.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Every key a state carrying this intent may hold.
    pub fn allowed(&self) -> impl Iterator<Item = &String> {
        self.required
            .iter()
            .chain(&self.optional)
            .chain(&self.answers)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeConfig {
    /// Dotted path below the root, e.g. `Task.Conference.Dates.Deadlines`.
    pub path: String,
    #[serde(default)]
    pub handler: Option<String>,
    #[serde(default)]
    pub intents: Vec<IntentConfig>,
}

impl NodeConfig {
    pub fn segments(&self) -> Vec<String> {
        split_path(&self.path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub slots: Vec<String>,
    #[serde(default)]
    pub answer_slots: Vec<String>,
    #[serde(default, rename = "node")]
    pub nodes: Vec<NodeConfig>,
}

fn default_version() -> u32 {
    1
}

impl SchemaConfig {
    pub fn from_toml(text: &str) -> Result<Self, SchemaError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SchemaError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SchemaError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }
}

pub fn split_path(dotted: &str) -> Vec<String> {
    dotted
        .split('.')
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn join_path(path: &[String]) -> String {
    path.join(".")
}

/// Read-only view of the schema: which domains exist, which intents each
/// owns, and which slots each intent may carry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaRegistry {
    /// Every domain path below the root, in declaration order.
    pub domains: Vec<Vec<String>>,
    pub intents: BTreeMap<String, BTreeSet<String>>,
    pub slot_schemas: BTreeMap<String, IntentConfig>,
    pub slot_inventory: BTreeSet<String>,
    pub answer_inventory: BTreeSet<String>,
    intent_domain: BTreeMap<String, Vec<String>>,
}

impl SchemaRegistry {
    pub fn from_config(config: &SchemaConfig) -> Result<Self, SchemaError> {
        let slot_inventory: BTreeSet<String> = config.slots.iter().cloned().collect();
        let answer_inventory: BTreeSet<String> = config.answer_slots.iter().cloned().collect();
        if let Some(clash) = slot_inventory.intersection(&answer_inventory).next() {
            return Err(SchemaError::SlotClash(clash.clone()));
        }

        let mut domains: Vec<Vec<String>> = Vec::new();
        let mut known: BTreeSet<String> = BTreeSet::new();
        let mut intents = BTreeMap::new();
        let mut slot_schemas = BTreeMap::new();
        let mut intent_domain: BTreeMap<String, Vec<String>> = BTreeMap::new();

        for node in &config.nodes {
            let segments = node.segments();
            let dotted = join_path(&segments);
            if segments.len() > 1 && !known.contains(&join_path(&segments[..segments.len() - 1])) {
                return Err(SchemaError::MissingParent(dotted));
            }
            if !known.insert(dotted.clone()) {
                return Err(SchemaError::DuplicateNode(dotted));
            }
            let mut owned = BTreeSet::new();
            for intent in &node.intents {
                if let Some(first) = intent_domain.get(&intent.name) {
                    return Err(SchemaError::DuplicateIntent {
                        intent: intent.name.clone(),
                        first: join_path(first),
                        second: dotted,
                    });
                }
                for slot in intent.required.iter().chain(&intent.optional) {
                    if !slot_inventory.contains(slot) {
                        return Err(SchemaError::UnknownSlot {
                            intent: intent.name.clone(),
                            slot: slot.clone(),
                        });
                    }
                }
                for slot in &intent.answers {
                    if !answer_inventory.contains(slot) {
                        return Err(SchemaError::UnknownSlot {
                            intent: intent.name.clone(),
                            slot: slot.clone(),
                        });
                    }
                }
                owned.insert(intent.name.clone());
                intent_domain.insert(intent.name.clone(), segments.clone());
                slot_schemas.insert(intent.name.clone(), intent.clone());
            }
            intents.insert(dotted, owned);
            domains.push(segments);
        }

        Ok(SchemaRegistry {
            domains,
            intents,
            slot_schemas,
            slot_inventory,
            answer_inventory,
            intent_domain,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SchemaError> {
        Self::from_config(&SchemaConfig::load(path)?)
    }

    pub fn intent_count(&self) -> usize {
        self.slot_schemas.len()
    }

    /// Domain path (below the root) of the node owning `intent`.
    pub fn domain_of(&self, intent: &str) -> Option<&[String]> {
        self.intent_domain.get(intent).map(Vec::as_slice)
    }

    pub fn schema(&self, intent: &str) -> Option<&IntentConfig> {
        self.slot_schemas.get(intent)
    }

    pub fn has_domain(&self, path: &[String]) -> bool {
        self.domains.iter().any(|d| d == path)
    }

    pub fn is_slot(&self, name: &str) -> bool {
        self.slot_inventory.contains(name) || self.answer_inventory.contains(name)
    }

    pub fn intent_names(&self) -> impl Iterator<Item = &String> {
        self.slot_schemas.keys()
    }
}
