use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::agent::Agent;

/// Several phrasings of one information need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityProbe {
    pub key: String,
    /// Substrings every correct reply contains, compared case-insensitively.
    pub expected: Vec<String>,
    pub formulations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageValue {
    pub value: String,
    pub expected: Vec<String>,
}

/// One question pattern asked with several slot values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageProbe {
    /// Question text with a single `{}` where the value goes.
    pub template: String,
    pub values: Vec<CoverageValue>,
}

#[derive(Debug, Deserialize)]
struct ProbeFile<T> {
    probe: Vec<T>,
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, EvalError> {
    let err = |message: String| EvalError::Probe {
        path: path.display().to_string(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let file: ProbeFile<T> = toml::from_str(&text).map_err(|e| err(e.to_string()))?;
    if file.probe.is_empty() {
        return Err(err("no probes".into()));
    }
    Ok(file.probe)
}

pub fn load_diversity_probes(path: impl AsRef<Path>) -> Result<Vec<DiversityProbe>, EvalError> {
    let probes: Vec<DiversityProbe> = load(path.as_ref())?;
    for p in &probes {
        if p.formulations.is_empty() || p.expected.is_empty() {
            return Err(EvalError::Probe {
                path: path.as_ref().display().to_string(),
                message: format!("probe {:?} needs formulations and expected answers", p.key),
            });
        }
    }
    Ok(probes)
}

pub fn load_coverage_probes(path: impl AsRef<Path>) -> Result<Vec<CoverageProbe>, EvalError> {
    let probes: Vec<CoverageProbe> = load(path.as_ref())?;
    for p in &probes {
        if p.template.matches("{}").count() != 1 || p.values.is_empty() {
            return Err(EvalError::Probe {
                path: path.as_ref().display().to_string(),
                message: format!("probe {:?} needs one `{{}}` and at least one value", p.template),
            });
        }
    }
    Ok(probes)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeOutcome {
    pub question: String,
    pub reply: String,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub outcomes: Vec<ProbeOutcome>,
}

impl ProbeReport {
    pub fn correct(&self) -> usize {
        self.outcomes.iter().filter(|o| o.correct).count()
    }

    pub fn percent(&self) -> f64 {
        if self.outcomes.is_empty() {
            return 0.0;
        }
        100.0 * self.correct() as f64 / self.outcomes.len() as f64
    }
}

pub fn is_correct(reply: &str, expected: &[String]) -> bool {
    let reply = reply.to_lowercase();
    expected.iter().all(|e| reply.contains(&e.to_lowercase()))
}

/// Asks `question` in a session of its own.
fn ask(agent: &Agent, session: &str, question: &str, expected: &[String]) -> ProbeOutcome {
    let reply = agent.process_turn(session, question).reply;
    ProbeOutcome {
        question: question.to_string(),
        correct: is_correct(&reply, expected),
        reply,
    }
}

/// Share of formulations answered correctly.
pub fn evaluate_diversity(probes: &[DiversityProbe], agent: &Agent) -> ProbeReport {
    let mut outcomes = Vec::new();
    for (i, p) in probes.iter().enumerate() {
        for (j, f) in p.formulations.iter().enumerate() {
            outcomes.push(ask(agent, &format!("diversity-{i}-{j}"), f, &p.expected));
        }
    }
    ProbeReport { outcomes }
}

/// Share of slot values answered correctly.
pub fn evaluate_coverage(probes: &[CoverageProbe], agent: &Agent) -> ProbeReport {
    let mut outcomes = Vec::new();
    for (i, p) in probes.iter().enumerate() {
        for (j, v) in p.values.iter().enumerate() {
            let question = p.template.replacen("{}", &v.value, 1);
            outcomes.push(ask(agent, &format!("coverage-{i}-{j}"), &question, &v.expected));
        }
    }
    ProbeReport { outcomes }
}
