use std::fs;
use std::path::Path;

use illuscope_core::evalkit::{aggregate, read_records, BenchReport};

use super::bench::load_manifest;
use crate::CliError;

/// Aggregates a records file against its manifest.
pub fn cmd_report(manifest: &Path, records: &Path) -> Result<BenchReport, CliError> {
    let samples = load_manifest(manifest)?;
    if !records.is_file() {
        return Err(CliError::config(format!("records {} not found", records.display())));
    }
    let recs = read_records(records)?;
    Ok(aggregate(&recs, &samples)?)
}

pub fn write_report(report: &BenchReport, text: Option<&Path>, json: Option<&Path>) -> Result<(), CliError> {
    let write = |path: &Path, body: String| {
        fs::write(path, body).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
    };
    if let Some(p) = text {
        write(p, format!("{report}\n"))?;
    }
    if let Some(p) = json {
        write(p, serde_json::to_string_pretty(report).expect("report serializes") + "\n")?;
    }
    Ok(())
}
