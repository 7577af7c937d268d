//! Line-oriented chat loop.
//!
//! `:state` prints the record of the latest turn, `:quit` says goodbye
//! through the exit skill and ends the loop. When `echo` is set each input
//! line is repeated as `> text` so a piped session reads as a transcript.

use std::io::{self, BufRead, Write};

use scholarbot::agent::{Agent, TurnResult};

use crate::transcripts::TranscriptLog;

pub const SESSION: &str = "repl";
const QUIT_UTTERANCE: &str = "bye";

#[derive(Debug, Clone, Copy, Default)]
pub struct ReplOptions {
    /// Print `> ` before reading each line.
    pub prompt: bool,
    /// Repeat each input line in the output.
    pub echo: bool,
    /// Print the turn record after every reply.
    pub debug: bool,
}

fn emit(out: &mut impl Write, turn: &TurnResult, opts: ReplOptions) -> io::Result<()> {
    for reply in &turn.replies {
        writeln!(out, "{reply}")?;
    }
    if opts.debug {
        writeln!(out, "{}", serde_json::to_string(turn).unwrap_or_default())?;
    }
    Ok(())
}

/// Runs until `:quit` or end of input.
pub fn run_repl(
    agent: &Agent,
    input: impl BufRead,
    mut out: impl Write,
    opts: ReplOptions,
    transcripts: Option<&TranscriptLog>,
) -> io::Result<()> {
    let mut lines = input.lines();
    loop {
        if opts.prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        let Some(line) = lines.next().transpose()? else {
            return Ok(());
        };
        if opts.echo {
            writeln!(out, "> {line}")?;
        }
        match line.trim() {
            ":state" => match agent.last_turn(SESSION) {
                Some(turn) => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&turn).unwrap_or_default()
                )?,
                None => writeln!(out, "no turns yet")?,
            },
            ":quit" => {
                let turn = agent.process_turn(SESSION, QUIT_UTTERANCE);
                if let Some(log) = transcripts {
                    log.append(&turn);
                }
                emit(&mut out, &turn, opts)?;
                return out.flush();
            }
            _ => {
                let turn = agent.process_turn(SESSION, &line);
                if let Some(log) = transcripts {
                    log.append(&turn);
                }
                emit(&mut out, &turn, opts)?;
            }
        }
        out.flush()?;
    }
}
