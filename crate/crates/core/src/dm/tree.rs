use std::collections::BTreeMap;

use serde::Serialize;

use super::DmError;
use crate::schema::{join_path, split_path, IntentConfig, NodeConfig, SchemaConfig, SchemaRegistry, ROOT};
use crate::state::DialogueState;
use crate::template::{parse_templates, Direction, Template};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkillNode {
    pub name: String,
    /// Path below the root; empty for the root.
    pub path: Vec<String>,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub intents: Vec<String>,
    pub handler: Option<String>,
    /// Ids of the node's NLU and NLG templates.
    pub nlu: Vec<String>,
    pub nlg: Vec<String>,
}

/// The root-to-node chain currently providing context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActivePath {
    pub nodes: Vec<NodeId>,
    pub activated_at: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteKind {
    /// The active path owns the intent.
    Stay,
    /// A new path replaced the old one.
    Switch,
    /// A General leaf answered without touching the path.
    OneShot,
    /// Nobody owns the intent.
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Route {
    pub target: NodeId,
    pub path: Option<ActivePath>,
    pub kind: RouteKind,
}

/// Skill tree plus the schema and template sets it was built from.
#[derive(Debug, Clone)]
pub struct SkillTree {
    config: SchemaConfig,
    registry: SchemaRegistry,
    nodes: Vec<SkillNode>,
    owner: BTreeMap<String, NodeId>,
    templates: Vec<Template>,
    known_handlers: Vec<String>,
}

pub const GENERAL: &str = "General";
pub const FALLBACK_PATH: &str = "General.Fallback";

impl SkillTree {
    /// Builds the tree from a schema config. Every `handler` must be one of
    /// `known_handlers`.
    pub fn build(config: &SchemaConfig, known_handlers: &[&str]) -> Result<Self, DmError> {
        let registry = SchemaRegistry::from_config(config)?;
        let mut tree = SkillTree {
            config: config.clone(),
            registry,
            nodes: vec![SkillNode {
                name: ROOT.to_string(),
                path: vec![],
                parent: None,
                children: vec![],
                intents: vec![],
                handler: None,
                nlu: vec![],
                nlg: vec![],
            }],
            owner: BTreeMap::new(),
            templates: vec![],
            known_handlers: known_handlers.iter().map(|s| s.to_string()).collect(),
        };
        for node in &config.nodes {
            tree.attach(node)?;
        }
        Ok(tree)
    }

    fn attach(&mut self, node: &NodeConfig) -> Result<NodeId, DmError> {
        if let Some(h) = &node.handler {
            if !self.known_handlers.iter().any(|k| k == h) {
                return Err(DmError::UnknownHandler(h.clone()));
            }
        }
        let path = node.segments();
        let parent = self
            .find(&path[..path.len().saturating_sub(1)])
            .ok_or_else(|| DmError::UnknownParent(node.path.clone()))?;
        let id = self.nodes.len();
        self.nodes.push(SkillNode {
            name: path.last().cloned().unwrap_or_default(),
            path,
            parent: Some(parent),
            children: vec![],
            intents: node.intents.iter().map(|i| i.name.clone()).collect(),
            handler: node.handler.clone(),
            nlu: vec![],
            nlg: vec![],
        });
        self.nodes[parent].children.push(id);
        for intent in &node.intents {
            self.owner.insert(intent.name.clone(), id);
        }
        Ok(id)
    }

    /// Makes `id` acceptable as a handler for later registrations.
    pub fn allow_handler(&mut self, id: &str) {
        if !self.known_handlers.iter().any(|k| k == id) {
            self.known_handlers.push(id.to_string());
        }
    }

    pub fn registry(&self) -> &SchemaRegistry {
        &self.registry
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &SkillNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 1
    }

    pub fn find(&self, path: &[String]) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.path == path)
    }

    pub fn owner_of(&self, intent: &str) -> Option<NodeId> {
        self.owner.get(intent).copied()
    }

    pub fn fallback_node(&self) -> NodeId {
        self.find(&split_path(FALLBACK_PATH)).unwrap_or(0)
    }

    /// Node ids from the root down to `id`.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn is_valid_path(&self, path: &ActivePath) -> bool {
        path.nodes.first() == Some(&0)
            && path
                .nodes
                .windows(2)
                .all(|w| w[1] < self.nodes.len() && self.nodes[w[1]].parent == Some(w[0]))
    }

    /// Dotted name of an active path, e.g. `Master.Task.Paper.Meta-data`.
    pub fn describe(&self, path: &ActivePath) -> String {
        path.nodes
            .iter()
            .map(|&n| self.nodes[n].name.as_str())
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn templates(&self, direction: Direction) -> impl Iterator<Item = &Template> {
        self.templates.iter().filter(move |t| t.direction == direction)
    }

    /// Attaches parsed templates to the nodes owning their intents.
    pub fn add_templates(&mut self, templates: Vec<Template>) -> Result<(), DmError> {
        for t in templates {
            let node = self
                .owner_of(&t.intent)
                .ok_or_else(|| DmError::UnknownIntent(t.intent.clone()))?;
            match t.direction {
                Direction::Nlu => self.nodes[node].nlu.push(t.id.clone()),
                Direction::Nlg => self.nodes[node].nlg.push(t.id.clone()),
            }
            self.templates.push(t);
        }
        Ok(())
    }

    /// Attaches a new skill below `parent` (dotted path) together with its
    /// template files. The skill is routable as soon as this returns; on
    /// error the tree is left untouched.
    pub fn register_skill(
        &mut self,
        parent: &str,
        name: &str,
        handler: &str,
        intents: Vec<IntentConfig>,
        nlu_tsv: &str,
        nlg_tsv: &str,
    ) -> Result<NodeId, DmError> {
        let mut path = split_path(parent);
        if !path.is_empty() && self.find(&path).is_none() {
            return Err(DmError::UnknownParent(parent.to_string()));
        }
        path.push(name.to_string());
        let node = NodeConfig {
            path: join_path(&path),
            handler: Some(handler.to_string()),
            intents,
        };
        let mut config = self.config.clone();
        config.nodes.push(node.clone());
        let registry = SchemaRegistry::from_config(&config)?;
        let prefix = format!("skill-{}", name.to_lowercase());
        let nlu = parse_templates(nlu_tsv, &format!("{prefix}-nlu"), &registry)?;
        let nlg = parse_templates(nlg_tsv, &format!("{prefix}-nlg"), &registry)?;
        let all: Vec<Template> = nlu.into_iter().chain(nlg).collect();
        if let Some(t) = all.iter().find(|t| t.domain_path != path) {
            return Err(DmError::ForeignTemplate(t.id.clone()));
        }
        for intent in &node.intents {
            if !all
                .iter()
                .any(|t| t.direction == Direction::Nlg && t.intent == intent.name)
            {
                return Err(DmError::NoResponseTemplate(intent.name.clone()));
            }
        }

        let mut next = self.clone();
        next.config = config;
        next.registry = registry;
        let id = next.attach(&node)?;
        next.add_templates(all)?;
        *self = next;
        Ok(id)
    }

    /// Picks the node for `input` and the active path after this turn.
    pub fn route(&self, active: Option<&ActivePath>, input: &DialogueState) -> Route {
        let Some(owner) = self.owner_of(&input.intent) else {
            return Route {
                target: self.fallback_node(),
                path: active.cloned(),
                kind: RouteKind::Fallback,
            };
        };
        if self.nodes[owner].path.first().map(String::as_str) == Some(GENERAL) {
            return Route {
                target: owner,
                path: active.cloned(),
                kind: RouteKind::OneShot,
            };
        }
        if let Some(path) = active {
            if path.nodes.contains(&owner) {
                return Route {
                    target: owner,
                    path: Some(path.clone()),
                    kind: RouteKind::Stay,
                };
            }
        }
        Route {
            target: owner,
            path: Some(ActivePath {
                nodes: self.path_to(owner),
                activated_at: input.turn_index,
            }),
            kind: RouteKind::Switch,
        }
    }
}
