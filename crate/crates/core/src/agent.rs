//! The dialogue master: one turn runs normalize → NLU → follow-up
//! resolution → routing → skill → NLG → memory.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augment::{build_dataset, AugmentError, PipelineConfig};
use crate::dm::{DmError, RouteKind, Session, SkillTree};
use crate::kb::{load_snapshot, Connector, KbError, KbSnapshot, SharedSnapshot};
use crate::nlg::{generate_response, NlgTemplates, Rendered};
use crate::nlu::embedding::EmbeddingTable;
use crate::nlu::svm::SvmParams;
use crate::nlu::{MlModels, NluError, NluPipeline, NluSource};
use crate::schema::{join_path, IntentConfig, SchemaConfig};
use crate::skills::{
    builtin_ids, builtin_skills, humanize_slot, Skill, SkillContext, SkillSet, MISSING_SLOT,
    REQUEST_INPUT, REQUEST_SLOT,
};
use crate::state::{validate_state, DialogueState, StateKind};
use crate::template::{load_template_files, Direction, TemplateFileError};
use crate::text::normalize_utterance;

/// Last-resort reply when even the fallback template cannot be rendered.
pub const APOLOGY: &str = "Sorry, something went wrong on my side.";

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("reading config {path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Schema(#[from] crate::schema::SchemaError),
    #[error(transparent)]
    Tree(#[from] DmError),
    #[error(transparent)]
    Templates(#[from] TemplateFileError),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Nlu(#[from] NluError),
    #[error(transparent)]
    Dataset(#[from] AugmentError),
    #[error("intent {0:?} has no response template")]
    MissingResponse(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub schema: PathBuf,
    pub nlu_templates: Vec<PathBuf>,
    pub nlg_templates: Vec<PathBuf>,
    pub snapshot_dir: PathBuf,
    pub embeddings: PathBuf,
    pub pipeline: PathBuf,
    #[serde(default)]
    pub models_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_capacity")]
    pub memory_capacity: usize,
    #[serde(default = "default_idle")]
    pub session_idle_minutes: i64,
    #[serde(default = "default_threshold")]
    pub nlu_threshold: f64,
}

fn default_capacity() -> usize {
    crate::dm::DEFAULT_CAPACITY
}

fn default_idle() -> i64 {
    60
}

fn default_threshold() -> f64 {
    crate::nlu::DEFAULT_THRESHOLD
}

impl AgentConfig {
    /// Reads a TOML config; relative paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, AgentError> {
        let path = path.as_ref();
        let err = |message: String| AgentError::Config {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let mut cfg: AgentConfig = toml::from_str(&text).map_err(|e| err(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut cfg.schema);
        cfg.nlu_templates.iter_mut().for_each(fix);
        cfg.nlg_templates.iter_mut().for_each(fix);
        fix(&mut cfg.snapshot_dir);
        fix(&mut cfg.embeddings);
        fix(&mut cfg.pipeline);
        if let Some(m) = cfg.models_dir.as_mut() {
            fix(m);
        }
        Ok(cfg)
    }
}

/// Everything recorded about one turn.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurnResult {
    pub session_id: String,
    pub turn_index: usize,
    pub user_text: String,
    /// `None` when the text had nothing to parse.
    pub nlu_source: Option<NluSource>,
    pub rule_template: Option<String>,
    /// State after follow-up resolution.
    pub input_state: DialogueState,
    pub route: RouteKind,
    pub skill: String,
    pub active_path: Option<String>,
    pub responses: Vec<DialogueState>,
    pub template_ids: Vec<String>,
    pub replies: Vec<String>,
    pub reply: String,
    pub latency_ms: f64,
}

#[derive(Debug)]
struct SessionSlot {
    session: Session,
    last: Option<TurnResult>,
}

pub struct Agent {
    config: AgentConfig,
    tree: SkillTree,
    nlu: NluPipeline<f64>,
    nlg: NlgTemplates,
    skills: SkillSet,
    kb: SharedSnapshot,
    sessions: Mutex<HashMap<String, Arc<Mutex<SessionSlot>>>>,
}

impl std::fmt::Debug for Agent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Agent")
            .field("nodes", &self.tree.len())
            .field("skills", &self.skills.keys().collect::<Vec<_>>())
            .finish_non_exhaustive()
    }
}

/// Loads cached models from `dir`, or trains them on the generated
/// dataset and caches them there.
pub fn warm_models(config: &AgentConfig) -> Result<(MlModels<f64>, EmbeddingTable<f64>), AgentError> {
    let table = EmbeddingTable::load(&config.embeddings)?;
    if let Some(dir) = &config.models_dir {
        if MlModels::<f64>::present_in(dir) {
            log::info!("loading models from {}", dir.display());
            return Ok((MlModels::load(dir)?, table));
        }
    }
    log::info!("training NLU models");
    let built = build_dataset(&PipelineConfig::load(&config.pipeline)?)?;
    let models = MlModels::train(&built.train, &table, &SvmParams::default())?;
    if let Some(dir) = &config.models_dir {
        models.save(dir)?;
    }
    Ok((models, table))
}

impl Agent {
    pub fn load(config: AgentConfig) -> Result<Self, AgentError> {
        let (models, table) = warm_models(&config)?;
        let (kb, diags) = load_snapshot(&config.snapshot_dir)?;
        if !diags.is_empty() {
            log::warn!("{} knowledge-base records rejected", diags.len());
        }
        Self::assemble(config, Some((models, table)), kb)
    }

    /// Builds an agent from loaded parts; `ml` may be omitted for a
    /// rules-only agent.
    pub fn assemble(
        config: AgentConfig,
        ml: Option<(MlModels<f64>, EmbeddingTable<f64>)>,
        kb: KbSnapshot,
    ) -> Result<Self, AgentError> {
        let schema = SchemaConfig::load(&config.schema)?;
        let mut tree = SkillTree::build(&schema, &builtin_ids())?;
        let paths: Vec<&PathBuf> = config.nlu_templates.iter().chain(&config.nlg_templates).collect();
        tree.add_templates(load_template_files(&paths, tree.registry())?)?;
        let nlg = NlgTemplates::new(tree.templates(Direction::Nlg));
        for intent in tree.registry().intent_names() {
            if nlg.candidates(intent).is_empty() {
                return Err(AgentError::MissingResponse(intent.clone()));
            }
        }
        let mut nlu = NluPipeline::new(tree.templates(Direction::Nlu).cloned().collect());
        nlu.threshold = config.nlu_threshold;
        if let Some((models, table)) = ml {
            nlu = nlu.with_models(models, table);
        }
        Ok(Agent {
            config,
            tree,
            nlu,
            nlg,
            skills: builtin_skills(),
            kb: SharedSnapshot::new(kb),
            sessions: Mutex::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn tree(&self) -> &SkillTree {
        &self.tree
    }

    pub fn nlu(&self) -> &NluPipeline<f64> {
        &self.nlu
    }

    pub fn nlg(&self) -> &NlgTemplates {
        &self.nlg
    }

    pub fn snapshot(&self) -> Arc<KbSnapshot> {
        self.kb.current()
    }

    pub fn refresh_snapshot(&self, connector: &dyn Connector, now: DateTime<Utc>) -> bool {
        self.kb.refresh(connector, now)
    }

    /// Adds a skill and its templates; routable from the next turn on.
    #[allow(clippy::too_many_arguments)]
    pub fn register_skill(
        &mut self,
        parent: &str,
        name: &str,
        handler_id: &str,
        handler: Arc<dyn Skill>,
        intents: Vec<IntentConfig>,
        nlu_tsv: &str,
        nlg_tsv: &str,
    ) -> Result<(), AgentError> {
        self.tree.allow_handler(handler_id);
        let id = self
            .tree
            .register_skill(parent, name, handler_id, intents, nlu_tsv, nlg_tsv)?;
        let node = self.tree.node(id);
        let owned = |t: &&crate::template::Template| {
            node.nlu.contains(&t.id) || node.nlg.contains(&t.id)
        };
        let added: Vec<_> = self.tree.templates(Direction::Nlu).filter(owned).cloned().collect();
        self.nlu.add_rules(added);
        let added: Vec<_> = self.tree.templates(Direction::Nlg).filter(owned).cloned().collect();
        self.nlg.extend(&added);
        self.skills.insert(handler_id.to_string(), handler);
        Ok(())
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    /// Drops sessions idle for longer than the configured limit.
    pub fn expire_idle(&self, now: DateTime<Utc>) -> usize {
        let limit = Duration::minutes(self.config.session_idle_minutes);
        let mut map = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
        let before = map.len();
        map.retain(|_, slot| match slot.try_lock() {
            Ok(s) => now - s.session.last_active <= limit,
            Err(_) => true,
        });
        before - map.len()
    }

    fn slot(&self, session_id: &str, now: DateTime<Utc>) -> Arc<Mutex<SessionSlot>> {
        let mut map = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
        Arc::clone(map.entry(session_id.to_string()).or_insert_with(|| {
            Arc::new(Mutex::new(SessionSlot {
                session: Session::new(session_id, self.config.seed, self.config.memory_capacity, now),
                last: None,
            }))
        }))
    }

    /// Debug record of the session's latest turn.
    pub fn last_turn(&self, session_id: &str) -> Option<TurnResult> {
        let slot = self
            .sessions
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .get(session_id)
            .cloned()?;
        let guard = slot.lock().unwrap_or_else(|e| e.into_inner());
        guard.last.clone()
    }

    /// Memory of a session, oldest first.
    pub fn memory(&self, session_id: &str) -> Vec<DialogueState> {
        let Some(slot) = self
            .sessions
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .get(session_id)
            .cloned()
        else {
            return vec![];
        };
        let guard = slot.lock().unwrap_or_else(|e| e.into_inner());
        guard.session.memory.states().cloned().collect()
    }

    pub fn process_turn(&self, session_id: &str, text: &str) -> TurnResult {
        let started = Instant::now();
        let now = Utc::now();
        self.expire_idle(now);
        let slot = self.slot(session_id, now);
        let mut guard = slot.lock().unwrap_or_else(|e| e.into_inner());
        let SessionSlot { session, last } = &mut *guard;
        session.touch(now);
        let mut result = self.run_turn(session, text);
        result.latency_ms = started.elapsed().as_secs_f64() * 1000.0;
        *last = Some(result.clone());
        result
    }

    fn fallback_state(&self, turn: usize, intent: &str) -> DialogueState {
        DialogueState::for_intent(self.tree.registry(), StateKind::Input, intent).at_turn(turn)
    }

    fn run_turn(&self, session: &mut Session, text: &str) -> TurnResult {
        let registry = self.tree.registry();
        let turn = session.turns;
        session.turns += 1;

        let (parsed, nlu_source, rule_template) = match normalize_utterance(text) {
            Ok(u) => {
                let out = self.nlu.parse(&u.at_turn(turn), registry);
                (out.state.at_turn(turn), Some(out.source), out.template_id)
            }
            Err(_) => (self.fallback_state(turn, REQUEST_INPUT), None, None),
        };
        let parsed = if validate_state(&parsed, registry).is_empty() {
            parsed
        } else {
            log::warn!("invalid parse for {text:?}, using fallback");
            self.fallback_state(turn, crate::nlu::FALLBACK_INTENT)
        };

        let kb = self.kb.current();
        let (input, route, skill_node, mut responses) = match session.resolve_followup(&parsed, registry) {
            Ok(input) => {
                let route = self.tree.route(session.active.as_ref(), &input);
                session.active = route.path.clone();
                let node = self.tree.node(route.target);
                let ctx = SkillContext {
                    kb: &kb,
                    memory: &session.memory,
                    registry,
                };
                let responses = match node.handler.as_deref().and_then(|h| self.skills.get(h)) {
                    Some(skill) => skill.handle(&input, &ctx),
                    None => vec![],
                };
                (input, route.kind, join_path(&node.path), responses)
            }
            Err(unresolved) => {
                let mut ask = DialogueState::for_intent(registry, StateKind::Response, REQUEST_SLOT).at_turn(turn);
                ask.set_slot(MISSING_SLOT, humanize_slot(&unresolved.missing[0]));
                let node = self.tree.fallback_node();
                (
                    unresolved.partial,
                    RouteKind::OneShot,
                    join_path(&self.tree.node(node).path),
                    vec![ask],
                )
            }
        };

        responses.retain(|r| {
            let v = validate_state(r, registry);
            if !v.is_empty() {
                log::error!("dropping invalid response {}: {v:?}", r.intent);
            }
            v.is_empty()
        });
        if responses.is_empty() {
            responses.push(self.fallback_state(turn, crate::nlu::FALLBACK_INTENT));
            responses[0].kind = StateKind::Response;
        }

        let mut replies = Vec::new();
        let mut template_ids = Vec::new();
        for r in &responses {
            let rendered = generate_response(r, &self.nlg, &mut session.rng, session.last_template.as_deref())
                .or_else(|e| {
                    log::error!("rendering {}: {e}", r.intent);
                    let apology = self.fallback_state(turn, crate::nlu::FALLBACK_INTENT);
                    generate_response(&apology, &self.nlg, &mut session.rng, None)
                })
                .unwrap_or_else(|_| Rendered {
                    text: APOLOGY.into(),
                    template_id: String::new(),
                });
            session.last_template = Some(rendered.template_id.clone());
            replies.push(rendered.text);
            template_ids.push(rendered.template_id);
        }

        if let Err(e) = session.memory.push_turn(input.clone(), &responses) {
            log::error!("memory push failed: {e}");
        }

        TurnResult {
            session_id: session.id.clone(),
            turn_index: turn,
            user_text: text.to_string(),
            nlu_source,
            rule_template,
            input_state: input,
            route,
            skill: skill_node,
            active_path: session.active.as_ref().map(|p| self.tree.describe(p)),
            responses,
            template_ids,
            reply: replies.join("\n"),
            replies,
            latency_ms: 0.0,
        }
    }
}
