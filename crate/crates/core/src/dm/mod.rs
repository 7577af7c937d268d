//! Skill tree, context paths, state memory and sessions.

mod memory;
mod session;
mod tree;

use thiserror::Error;

pub use memory::{MemoryStack, DEFAULT_CAPACITY};
pub use session::{session_seed, Session};
pub use tree::{ActivePath, NodeId, Route, RouteKind, SkillNode, SkillTree, FALLBACK_PATH, GENERAL};

#[derive(Debug, Error)]
pub enum DmError {
    #[error(transparent)]
    Schema(#[from] crate::schema::SchemaError),
    #[error(transparent)]
    Templates(#[from] crate::template::TemplateFileError),
    #[error("unknown skill handler {0:?}")]
    UnknownHandler(String),
    #[error("parent node of {0:?} does not exist")]
    UnknownParent(String),
    #[error("no node owns intent {0:?}")]
    UnknownIntent(String),
    #[error("template {0} belongs to another node")]
    ForeignTemplate(String),
    #[error("intent {0:?} has no response template")]
    NoResponseTemplate(String),
    #[error("state of turn {pushed} pushed above turn {top}")]
    OutOfOrder { top: usize, pushed: usize },
}
