//! Front ends for the agent: an interactive REPL and an HTTP chat service.

pub mod cli;
pub mod http;
pub mod repl;
pub mod transcripts;

pub use http::{router, AppState};
pub use repl::run_repl;
pub use transcripts::TranscriptLog;
