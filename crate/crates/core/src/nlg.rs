//! Response generation: keep the response templates that fill the most
//! slots of a state and pick one at random.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::state::DialogueState;
use crate::template::{render_template, Direction, Template, TemplateError};

#[derive(Debug, Error)]
pub enum NlgError {
    #[error("no response template for intent {0:?}")]
    NoTemplates(String),
    #[error("no response template of {0:?} can be filled from the state")]
    NoFillable(String),
    #[error(transparent)]
    Render(#[from] TemplateError),
}

/// Response templates indexed by intent.
#[derive(Debug, Clone, Default)]
pub struct NlgTemplates {
    by_intent: BTreeMap<String, Vec<Template>>,
}

impl NlgTemplates {
    pub fn new<'a>(templates: impl IntoIterator<Item = &'a Template>) -> Self {
        let mut out = Self::default();
        out.extend(templates);
        out
    }

    pub fn extend<'a>(&mut self, templates: impl IntoIterator<Item = &'a Template>) {
        for t in templates.into_iter().filter(|t| t.direction == Direction::Nlg) {
            self.by_intent.entry(t.intent.clone()).or_default().push(t.clone());
        }
    }

    pub fn candidates(&self, intent: &str) -> &[Template] {
        self.by_intent.get(intent).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn get(&self, id: &str) -> Option<&Template> {
        self.by_intent.values().flatten().find(|t| t.id == id)
    }

    pub fn intents(&self) -> impl Iterator<Item = &String> {
        self.by_intent.keys()
    }
}

pub fn is_fillable(t: &Template, state: &DialogueState) -> bool {
    t.placeholders().all(|p| state.slots.contains_key(p))
}

/// Fillable candidates with the largest number of distinct placeholders,
/// in candidate order.
pub fn maximal_fillable<'a>(candidates: &'a [Template], state: &DialogueState) -> Vec<&'a Template> {
    let fillable: Vec<&Template> = candidates.iter().filter(|t| is_fillable(t, state)).collect();
    let best = fillable.iter().map(|t| t.placeholder_set().len()).max();
    fillable
        .into_iter()
        .filter(|t| Some(t.placeholder_set().len()) == best)
        .collect()
}

/// Uniform choice among the maximal fillable candidates, skipping
/// `previous` when another one is available.
pub fn select_template<'a, R: Rng + ?Sized>(
    candidates: &'a [Template],
    state: &DialogueState,
    rng: &mut R,
    previous: Option<&str>,
) -> Result<&'a Template, NlgError> {
    if candidates.is_empty() {
        return Err(NlgError::NoTemplates(state.intent.clone()));
    }
    let mut pool = maximal_fillable(candidates, state);
    if pool.len() > 1 {
        if let Some(prev) = previous {
            pool.retain(|t| t.id != prev);
        }
    }
    if pool.is_empty() {
        return Err(NlgError::NoFillable(state.intent.clone()));
    }
    Ok(pool[rng.random_range(0..pool.len())])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rendered {
    pub text: String,
    pub template_id: String,
}

pub fn generate_response<R: Rng + ?Sized>(
    state: &DialogueState,
    templates: &NlgTemplates,
    rng: &mut R,
    previous: Option<&str>,
) -> Result<Rendered, NlgError> {
    let t = select_template(templates.candidates(&state.intent), state, rng, previous)?;
    Ok(Rendered {
        text: render_template(t, state)?,
        template_id: t.id.clone(),
    })
}
