use std::io::IsTerminal;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;
use scholarbot::agent::{warm_models, Agent};
use scholarbot::augment::{build_dataset, PipelineConfig};
use scholarbot::eval::{
    evaluate_coverage, evaluate_diversity, evaluate_nlu, load_coverage_probes, load_diversity_probes,
};
use scholarbot::kb::FileConnector;
use scholarbot::nlu::embedding::EmbeddingTable;
use scholarbot::nlu::svm::SvmParams;
use scholarbot::nlu::MlModels;
use scholarbot_gateway::cli::{Cli, Command};
use scholarbot_gateway::repl::ReplOptions;
use scholarbot_gateway::{router, run_repl, AppState, TranscriptLog};

type BoxError = Box<dyn std::error::Error + Send + Sync>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.debug { "debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn transcripts(cli: &Cli) -> Result<Option<TranscriptLog>, BoxError> {
    Ok(match &cli.transcript_dir {
        Some(dir) => Some(TranscriptLog::new(dir)?),
        None => None,
    })
}

fn run(cli: &Cli) -> Result<(), BoxError> {
    match cli.command.as_ref().unwrap_or(&Command::Repl) {
        Command::Repl => {
            let agent = Agent::load(cli.agent_config()?)?;
            let stdin = std::io::stdin();
            let interactive = stdin.is_terminal();
            let opts = ReplOptions {
                prompt: interactive,
                echo: !interactive,
                debug: cli.debug,
            };
            let log = transcripts(cli)?;
            run_repl(&agent, stdin.lock(), std::io::stdout().lock(), opts, log.as_ref())?;
            Ok(())
        }
        Command::Serve => serve(cli),
        Command::BuildDataset { out } => {
            let cfg = cli.agent_config()?;
            let built = build_dataset(&PipelineConfig::load(&cfg.pipeline)?)?;
            built.write(out)?;
            print!("{}", built.stats);
            Ok(())
        }
        Command::Train => {
            let cfg = cli.agent_config()?;
            let Some(dir) = &cfg.models_dir else {
                return Err("train needs --models-dir or models_dir in the config".into());
            };
            let built = build_dataset(&PipelineConfig::load(&cfg.pipeline)?)?;
            let table = EmbeddingTable::<f64>::load(&cfg.embeddings)?;
            let models = MlModels::train(&built.train, &table, &SvmParams::default())?;
            models.save(dir)?;
            println!("models written to {}", dir.display());
            Ok(())
        }
        Command::Evaluate { probes } => {
            let cfg = cli.agent_config()?;
            let built = build_dataset(&PipelineConfig::load(&cfg.pipeline)?)?;
            let (models, table) = warm_models(&cfg)?;
            println!("{}", evaluate_nlu(&models, &table, &built.train, &built.test)?);
            let agent = Agent::load(cfg)?;
            let dir = cli.probes_dir(probes.as_ref());
            let diversity = evaluate_diversity(&load_diversity_probes(dir.join("diversity.toml"))?, &agent);
            let coverage = evaluate_coverage(&load_coverage_probes(dir.join("coverage.toml"))?, &agent);
            println!(
                "diversity {:.2}% ({}/{})",
                diversity.percent(),
                diversity.correct(),
                diversity.outcomes.len()
            );
            println!(
                "coverage  {:.2}% ({}/{})",
                coverage.percent(),
                coverage.correct(),
                coverage.outcomes.len()
            );
            Ok(())
        }
    }
}

fn serve(cli: &Cli) -> Result<(), BoxError> {
    let cfg = cli.agent_config()?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(("0.0.0.0", cli.port)).await?;
        log::info!("listening on {}", listener.local_addr()?);
        let mut state = AppState::warming();
        state.debug = cli.debug;
        state.transcripts = transcripts(cli)?.map(Arc::new);

        let warm = state.clone();
        let snapshot_dir = cfg.snapshot_dir.clone();
        tokio::spawn(async move {
            match tokio::task::spawn_blocking(move || Agent::load(cfg)).await {
                Ok(Ok(agent)) => {
                    let agent = Arc::new(agent);
                    warm.install(Arc::clone(&agent));
                    log::info!("agent ready");
                    refresh_loop(agent, FileConnector::new(snapshot_dir)).await;
                }
                Ok(Err(e)) => {
                    log::error!("warm-up failed: {e}");
                    std::process::exit(1);
                }
                Err(e) => {
                    log::error!("warm-up panicked: {e}");
                    std::process::exit(1);
                }
            }
        });

        axum::serve(listener, router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

/// Checks hourly whether the knowledge-base snapshot is due for a refresh.
async fn refresh_loop(agent: Arc<Agent>, connector: FileConnector) {
    let mut tick = tokio::time::interval(Duration::from_secs(3600));
    tick.tick().await;
    loop {
        tick.tick().await;
        let agent = Arc::clone(&agent);
        let connector = connector.clone();
        let _ = tokio::task::spawn_blocking(move || agent.refresh_snapshot(&connector, chrono::Utc::now())).await;
    }
}
