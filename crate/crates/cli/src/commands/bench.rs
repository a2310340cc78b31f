use std::path::{Path, PathBuf};

use illuscope_client::{run_bench, BenchOptions, BenchSummary, LlmJudge, VisionClient};
use illuscope_core::evalkit::{Judge, Method};
use illuscope_core::illugen::{read_manifest, SampleRecord};

use crate::{CliError, RunConfig};

/// Command-line values that replace the `bench` section of the config.
#[derive(Debug, Clone, Default)]
pub struct BenchOverrides {
    pub methods: Vec<Method>,
    pub manifest: Option<PathBuf>,
    pub records: Option<PathBuf>,
    pub max_samples: Option<usize>,
}

pub(crate) fn load_manifest(path: &Path) -> Result<Vec<SampleRecord>, CliError> {
    if !path.is_file() {
        return Err(CliError::config(format!("manifest {} not found", path.display())));
    }
    Ok(read_manifest(path)?)
}

pub(crate) fn manifest_root(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// The judge endpoint from the config, when one is set.
pub fn build_judge(cfg: &RunConfig) -> Result<Option<LlmJudge>, CliError> {
    cfg.judge
        .as_ref()
        .map(|j| VisionClient::from_config(j.clone()).map(LlmJudge::new))
        .transpose()
        .map_err(CliError::from)
}

/// Runs every configured method in turn, resuming from the records file.
pub fn cmd_bench(cfg: &RunConfig, overrides: &BenchOverrides) -> Result<Vec<(Method, BenchSummary)>, CliError> {
    let methods = if overrides.methods.is_empty() {
        cfg.bench.methods.clone()
    } else {
        overrides.methods.clone()
    };
    if methods.is_empty() {
        return Err(CliError::config("no bench methods configured"));
    }
    let schedule = cfg.smsp_schedule()?;
    let stoplist = cfg.stoplist()?;
    let manifest_path = overrides.manifest.clone().unwrap_or_else(|| cfg.manifest_path());
    let records_path = overrides.records.clone().unwrap_or_else(|| cfg.records_path());
    let manifest = load_manifest(&manifest_path)?;
    let client = VisionClient::from_config(cfg.target.clone())?;
    let judge = build_judge(cfg)?;
    if let Some(dir) = records_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        crate::config::ensure_writable(dir)?;
    }

    let mut out = Vec::new();
    for method in methods {
        let opts = BenchOptions {
            method,
            schedule: schedule.clone(),
            prompts: cfg.prompts.clone(),
            filtered: cfg.baselines.filtered,
            blur_hist: cfg.baselines.blur_hist,
            stoplist: stoplist.clone(),
            max_new: overrides.max_samples.or(cfg.bench.max_samples),
        };
        let summary = run_bench(
            &manifest,
            manifest_root(&manifest_path),
            &records_path,
            &opts,
            &client,
            judge.as_ref().map(|j| j as &dyn Judge),
        )?;
        out.push((method, summary));
    }
    Ok(out)
}
