mod analyze;
mod bench;
mod generate;
mod judge;
mod process;
mod report;

use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

pub use analyze::{cmd_analyze, pairs_path, write_bands_csv, write_pairs_csv, AnalyzeOutput, BandRow, PairRow};
pub use bench::{build_judge, cmd_bench, BenchOverrides};
pub use generate::{cmd_generate, GenerateOutput};
pub use judge::{cmd_judge_only, JudgeOnlySummary};
pub use process::{cmd_process, ProcessMode};
pub use report::{cmd_report, write_report};

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

/// A single file as given, or the images in a directory sorted by name.
pub(crate) fn collect_images(input: &Path) -> Result<Vec<PathBuf>, CliError> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    if !input.is_dir() {
        return Err(CliError::config(format!("{} does not exist", input.display())));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(input)
        .map_err(|e| CliError::config(format!("{}: {e}", input.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    if files.is_empty() {
        return Err(CliError::config(format!("no images in {}", input.display())));
    }
    files.sort();
    Ok(files)
}
