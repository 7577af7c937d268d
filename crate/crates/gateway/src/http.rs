//! HTTP chat service.
//!
//! * `POST /chat` `{session_id?, text, debug?}` → `{session_id, reply, debug?}`
//! * `GET /health` → `{status, fetched_at}`
//! * `GET /schema` → domains, intents and slots
//!
//! Every endpoint answers 503 until the agent has been installed.

use std::sync::{Arc, OnceLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::json;

use scholarbot::agent::{Agent, TurnResult, APOLOGY};
use scholarbot::schema::join_path;

use crate::transcripts::TranscriptLog;

#[derive(Clone, Default)]
pub struct AppState {
    agent: Arc<OnceLock<Arc<Agent>>>,
    /// Attach the debug block even when the request does not ask for it.
    pub debug: bool,
    pub transcripts: Option<Arc<TranscriptLog>>,
}

impl AppState {
    /// State whose agent is still warming up.
    pub fn warming() -> Self {
        Self::default()
    }

    pub fn ready(agent: Arc<Agent>) -> Self {
        let state = Self::default();
        state.install(agent);
        state
    }

    /// Makes the service ready. Returns false if an agent was already set.
    pub fn install(&self, agent: Arc<Agent>) -> bool {
        self.agent.set(agent).is_ok()
    }

    pub fn agent(&self) -> Option<Arc<Agent>> {
        self.agent.get().cloned()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatRequest {
    #[serde(default)]
    pub session_id: Option<String>,
    pub text: String,
    #[serde(default)]
    pub debug: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatResponse {
    pub session_id: String,
    pub reply: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub debug: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    #[serde(default)]
    pub fetched_at: Option<DateTime<Utc>>,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/chat", post(chat))
        .route("/health", get(health))
        .route("/schema", get(schema))
        .with_state(state)
}

fn warming_up() -> Response {
    (
        StatusCode::SERVICE_UNAVAILABLE,
        Json(Health {
            status: "warming-up".into(),
            fetched_at: None,
        }),
    )
        .into_response()
}

async fn chat(State(state): State<AppState>, body: Result<Json<ChatRequest>, JsonRejection>) -> Response {
    let Some(agent) = state.agent() else {
        return warming_up();
    };
    let req = match body {
        Ok(Json(req)) => req,
        Err(e) => {
            return (StatusCode::BAD_REQUEST, Json(json!({ "error": e.body_text() }))).into_response();
        }
    };
    let session_id = req
        .session_id
        .filter(|s| !s.trim().is_empty())
        .unwrap_or_else(|| uuid::Uuid::new_v4().to_string());

    let sid = session_id.clone();
    let turn = tokio::task::spawn_blocking(move || agent.process_turn(&sid, &req.text)).await;
    let turn: Option<TurnResult> = match turn {
        Ok(t) => Some(t),
        Err(e) => {
            log::error!("turn for session {session_id} failed: {e}");
            None
        }
    };
    if let (Some(log), Some(t)) = (&state.transcripts, &turn) {
        log.append(t);
    }
    let debug = (req.debug || state.debug)
        .then(|| turn.as_ref().and_then(|t| serde_json::to_value(t).ok()))
        .flatten();
    let reply = turn.map(|t| t.reply).unwrap_or_else(|| APOLOGY.to_string());
    Json(ChatResponse {
        session_id,
        reply,
        debug,
    })
    .into_response()
}

async fn health(State(state): State<AppState>) -> Response {
    let Some(agent) = state.agent() else {
        return warming_up();
    };
    Json(Health {
        status: "ok".into(),
        fetched_at: Some(agent.snapshot().fetched_at),
    })
    .into_response()
}

#[derive(Debug, Serialize)]
struct IntentInfo<'a> {
    name: &'a str,
    domain: String,
    required: &'a [String],
    optional: &'a [String],
    answers: &'a [String],
}

async fn schema(State(state): State<AppState>) -> Response {
    let Some(agent) = state.agent() else {
        return warming_up();
    };
    let reg = agent.tree().registry();
    let intents: Vec<IntentInfo> = reg
        .slot_schemas
        .values()
        .map(|s| IntentInfo {
            name: &s.name,
            domain: reg.domain_of(&s.name).map(join_path).unwrap_or_default(),
            required: &s.required,
            optional: &s.optional,
            answers: &s.answers,
        })
        .collect();
    Json(json!({
        "domains": reg.domains.iter().map(|d| join_path(d)).collect::<Vec<_>>(),
        "intents": intents,
        "slots": reg.slot_inventory,
        "answer_slots": reg.answer_inventory,
    }))
    .into_response()
}
