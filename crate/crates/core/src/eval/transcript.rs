//! Plain-text dialogue transcripts for golden comparisons.

use crate::agent::Agent;

/// User lines of a transcript: every line starting with `> `.
pub fn transcript_inputs(text: &str) -> Vec<String> {
    text.lines()
        .filter_map(|l| l.strip_prefix("> "))
        .map(str::to_string)
        .collect()
}

/// Runs `inputs` through one session and renders each turn as
///
/// ```text
/// > user text
/// [intent | route | active path]
/// < reply line
/// ```
///
/// followed by a blank line.
pub fn run_transcript(agent: &Agent, session_id: &str, inputs: &[String]) -> String {
    let mut out = String::new();
    for text in inputs {
        let r = agent.process_turn(session_id, text);
        let route = serde_json::to_value(r.route)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        out.push_str(&format!("> {text}\n"));
        out.push_str(&format!(
            "[{} | {} | {}]\n",
            r.input_state.intent,
            route,
            r.active_path.as_deref().unwrap_or("-")
        ));
        for reply in &r.replies {
            out.push_str(&format!("< {reply}\n"));
        }
        out.push('\n');
    }
    out
}
