use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use illuscope_client::prepare_images;
use illuscope_core::evalkit::Method;
use illuscope_core::imaging::{load_image, save_png};
use illuscope_core::perception::Ablation;

use super::collect_images;
use crate::config::ensure_writable;
use crate::{CliError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessMode {
    Smsp,
    Filtered,
    BlurHist,
    Ablation(Ablation),
}

impl ProcessMode {
    fn method(self) -> Method {
        match self {
            ProcessMode::Smsp => Method::Smsp,
            ProcessMode::Filtered => Method::Filtered,
            ProcessMode::BlurHist => Method::BlurHist,
            ProcessMode::Ablation(a) => Method::SmspAblation(a),
        }
    }

    /// Tuple modes keep the original as `_v0`; baselines write one `_v1`.
    fn first_index(self) -> usize {
        match self {
            ProcessMode::Filtered | ProcessMode::BlurHist => 1,
            _ => 0,
        }
    }
}

impl FromStr for ProcessMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smsp" => Ok(ProcessMode::Smsp),
            "filtered" => Ok(ProcessMode::Filtered),
            "blur_hist" => Ok(ProcessMode::BlurHist),
            _ => s
                .strip_prefix("ablation:")
                .and_then(Ablation::parse_tag)
                .map(ProcessMode::Ablation)
                .ok_or_else(|| {
                    format!(
                        "unknown mode {s:?}; expected smsp, filtered, blur_hist or ablation:<no_filter|no_rescale|single_variant:N>"
                    )
                }),
        }
    }
}

impl fmt::Display for ProcessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessMode::Smsp => f.write_str("smsp"),
            ProcessMode::Filtered => f.write_str("filtered"),
            ProcessMode::BlurHist => f.write_str("blur_hist"),
            ProcessMode::Ablation(a) => write!(f, "ablation:{}", a.tag()),
        }
    }
}

/// Writes `{stem}_v{i}.png` for every image in `input` (a file or a
/// directory) and returns the written paths in order.
pub fn cmd_process(input: &Path, out_dir: &Path, mode: ProcessMode, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let schedule = cfg.smsp_schedule()?;
    let files = collect_images(input)?;
    if let ProcessMode::Ablation(Ablation::SingleVariant(i)) = mode {
        if i == 0 || i > schedule.k() {
            return Err(CliError::config(format!("variant index {i} out of range 1..={}", schedule.k())));
        }
    }
    ensure_writable(out_dir)?;

    let mut written = Vec::new();
    for file in files {
        let img = load_image(&file).map_err(|e| CliError::data(format!("{}: {e}", file.display())))?;
        let images = prepare_images(&img, mode.method(), &schedule, &cfg.baselines.filtered, &cfg.baselines.blur_hist)
            .map_err(|e| CliError::data(format!("{}: {e}", file.display())))?;
        let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("image");
        for (i, variant) in images.iter().enumerate() {
            let idx = i + mode.first_index();
            let path = out_dir.join(format!("{stem}_v{idx}.png"));
            let is_png = file.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));
            if idx == 0 && is_png {
                fs::copy(&file, &path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            } else {
                save_png(variant, &path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            }
            written.push(path);
        }
    }
    Ok(written)
}
