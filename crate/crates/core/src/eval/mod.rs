//! Offline evaluation: the NLU accuracy grid and probe-based diversity and
//! coverage scores.

mod nlu;
mod probes;
mod transcript;

use thiserror::Error;

pub use probes::{
    evaluate_coverage, evaluate_diversity, is_correct, load_coverage_probes, load_diversity_probes,
    CoverageProbe, CoverageValue, DiversityProbe, ProbeOutcome, ProbeReport,
};
pub use transcript::{run_transcript, transcript_inputs};
pub use nlu::{evaluate_nlu, MetricRow, NluReport, EMBEDDING, HMM, MAJORITY, RANDOM, SVM};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("models must be evaluated with a train split and a test split")]
    SplitMismatch,
    #[error("test split is empty")]
    EmptyTest,
    #[error("reading probes {path}: {message}")]
    Probe { path: String, message: String },
}
