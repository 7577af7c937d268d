//! Command-line arguments. Every global flag can also be set through a
//! `SCHOLARBOT_*` environment variable.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use scholarbot::agent::AgentConfig;

#[derive(Debug, Parser)]
#[command(name = "scholarbot", version, about = "Dialogue agent for papers, conferences, people and NLP news")]
pub struct Cli {
    /// Agent configuration file.
    #[arg(long, global = true, env = "SCHOLARBOT_CONFIG", default_value = "data/agent.toml")]
    pub config: PathBuf,
    /// HTTP port for `serve`.
    #[arg(long, global = true, env = "SCHOLARBOT_PORT", default_value_t = 8080)]
    pub port: u16,
    /// Knowledge-base snapshot directory (overrides the config).
    #[arg(long, global = true, env = "SCHOLARBOT_SNAPSHOT_DIR")]
    pub snapshot_dir: Option<PathBuf>,
    /// Directory for trained NLU models (overrides the config).
    #[arg(long, global = true, env = "SCHOLARBOT_MODELS_DIR")]
    pub models_dir: Option<PathBuf>,
    /// Seed for response selection (overrides the config).
    #[arg(long, global = true, env = "SCHOLARBOT_SEED")]
    pub seed: Option<u64>,
    /// Verbose logging; the REPL prints each turn's record and HTTP
    /// replies carry a debug block.
    #[arg(long, global = true, env = "SCHOLARBOT_DEBUG")]
    pub debug: bool,
    /// Append every turn to `<dir>/<session>.jsonl`.
    #[arg(long, global = true, env = "SCHOLARBOT_TRANSCRIPT_DIR")]
    pub transcript_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interactive session on stdin/stdout (the default).
    Repl,
    /// HTTP chat service.
    Serve,
    /// Generate the NLU dataset and write train/test/stats files.
    BuildDataset {
        #[arg(long, default_value = "dataset")]
        out: PathBuf,
    },
    /// Train the NLU models and store them in the models directory.
    Train,
    /// Print the NLU accuracy grid and the probe scores.
    Evaluate {
        /// Directory with diversity.toml and coverage.toml; defaults to
        /// `probes/` next to the config file.
        #[arg(long)]
        probes: Option<PathBuf>,
    },
}

impl Cli {
    /// Loads the agent config and applies the command-line overrides.
    pub fn agent_config(&self) -> Result<AgentConfig, scholarbot::agent::AgentError> {
        let mut cfg = AgentConfig::load(&self.config)?;
        if let Some(dir) = &self.snapshot_dir {
            cfg.snapshot_dir = dir.clone();
        }
        if let Some(dir) = &self.models_dir {
            cfg.models_dir = Some(dir.clone());
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }

    pub fn probes_dir(&self, explicit: Option<&PathBuf>) -> PathBuf {
        explicit.cloned().unwrap_or_else(|| {
            self.config
                .parent()
                .unwrap_or(std::path::Path::new("."))
                .join("probes")
        })
    }
}
