use std::collections::HashMap;
use std::fs;
use std::path::Path;

use illuscope_core::evalkit::{
    read_records, score, write_records, Judge, FLAG_CLIENT_ERROR, FLAG_JUDGE_MALFORMED, FLAG_JUDGE_UNAVAILABLE,
};

use super::bench::load_manifest;
use crate::{CliError, RunConfig};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JudgeOnlySummary {
    pub rescored: usize,
    pub changed: usize,
    /// Rescored records that still carry a judge flag.
    pub still_flagged: usize,
}

fn judge_flag(f: &str) -> bool {
    f == FLAG_JUDGE_UNAVAILABLE || f == FLAG_JUDGE_MALFORMED
}

/// Rescores stored responses without querying the target model. By default
/// only records whose judge step failed are revisited; `all` rescores every
/// record that has a response. The records file is rewritten in place.
pub fn cmd_judge_only(
    cfg: &RunConfig,
    manifest: &Path,
    records: &Path,
    all: bool,
    judge: &dyn Judge,
) -> Result<JudgeOnlySummary, CliError> {
    let samples = load_manifest(manifest)?;
    let truths: HashMap<&str, &str> = samples.iter().map(|s| (s.id.as_str(), s.truth.as_str())).collect();
    if !records.is_file() {
        return Err(CliError::config(format!("records {} not found", records.display())));
    }
    let stoplist = cfg.stoplist()?;
    let mut recs = read_records(records)?;
    let mut summary = JudgeOnlySummary::default();
    for r in &mut recs {
        if r.has_flag(FLAG_CLIENT_ERROR) || !(all || r.flags.iter().any(|f| judge_flag(f))) {
            continue;
        }
        let truth = truths
            .get(r.sample_id.as_str())
            .ok_or_else(|| CliError::data(format!("record references unknown sample {}", r.sample_id)))?;
        let s = score(truth, &r.response, &stoplist, Some(judge), &cfg.prompts);
        summary.rescored += 1;
        if s.verdict != r.verdict {
            summary.changed += 1;
        }
        if !s.flags.is_empty() {
            summary.still_flagged += 1;
        }
        r.flags.retain(|f| !judge_flag(f));
        r.flags.extend(s.flags);
        r.verdict = s.verdict;
        r.judge_used = s.judge_used;
    }
    let tmp = records.with_extension("jsonl.tmp");
    write_records(&tmp, &recs)?;
    fs::rename(&tmp, records).map_err(|e| CliError::data(format!("{}: {e}", records.display())))?;
    Ok(summary)
}
