//! Prompting, hybrid scoring, accuracy aggregation and cost accounting.

mod cost;
mod matching;
mod prompts;
mod records;
mod report;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cost::{cost_model, fit_linear, tuple_image_count};
pub use matching::{
    judge, parse_judge_output, score, string_match, Judge, Scored, Stoplist, FLAG_JUDGE_MALFORMED,
    FLAG_JUDGE_UNAVAILABLE,
};
pub use prompts::{
    render_judge_prompt, render_prompt, PromptKind, PromptSet, COT_TEMPLATE, JUDGE_TEMPLATE, SMSP_TEMPLATE,
    VANILLA_TEMPLATE,
};
pub use records::{
    append_records, dedupe_last_wins, read_records, write_records, EvalRecord, Method, Usage, FLAG_CLIENT_ERROR,
};
pub use report::{aggregate, AccuracyCell, BenchReport, CostSummary, GroupRow, MethodReport, GROUPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Correct,
    Incorrect,
    /// Only produced by string matching; never a final verdict.
    NeedsJudge,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unknown prompt kind {0:?}")]
    UnknownKind(String),
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("hidden type must not be empty")]
    EmptyHiddenType,
    #[error("judge unavailable: {0}")]
    JudgeUnavailable(String),
    #[error("judge reply contains neither verdict: {0:?}")]
    MalformedJudgeOutput(String),
    #[error("record refers to unknown sample {0:?}")]
    UnknownSample(String),
    #[error("records line {line}: {message}")]
    Records { line: usize, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl EvalError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        EvalError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
