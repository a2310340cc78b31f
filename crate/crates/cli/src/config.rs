use std::fs;
use std::path::{Path, PathBuf};

use illuscope_client::EndpointConfig;
use illuscope_core::evalkit::{Method, PromptSet, Stoplist};
use illuscope_core::illugen::DatasetSpec;
use illuscope_core::perception::{
    build_schedule, BlurHistogramConfig, FilteredConfig, DEFAULT_K, DEFAULT_STRONG, DEFAULT_WEAK,
};
use illuscope_core::{Font, PerceptionParams, SmspSchedule};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything a run needs, read from one JSON file. Relative paths are
/// taken relative to the working directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed for all generated randomness.
    pub seed: u64,
    pub out_dir: PathBuf,
    pub dataset: DatasetSpec,
    /// Externally produced semantic illusions appended to the manifest.
    pub semantic: Option<SemanticImport>,
    pub schedule: ScheduleConfig,
    pub baselines: BaselineConfig,
    pub prompts: PromptSet,
    pub stoplist: StoplistConfig,
    pub target: EndpointConfig,
    pub judge: Option<EndpointConfig>,
    pub bench: BenchSection,
    pub report: ReportSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out_dir: PathBuf::from("illuscope-data"),
            dataset: DatasetSpec::default(),
            semantic: None,
            schedule: ScheduleConfig::default(),
            baselines: BaselineConfig::default(),
            prompts: PromptSet::default(),
            stoplist: StoplistConfig::default(),
            target: EndpointConfig::default(),
            judge: None,
            bench: BenchSection::default(),
            report: ReportSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemanticImport {
    pub images: PathBuf,
    /// JSON lines with `file`, `truth` and optional `hidden_type`, `theme`,
    /// `scale`, `bbox`.
    pub truths: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub k: usize,
    pub strong: PerceptionParams,
    pub weak: PerceptionParams,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            strong: PerceptionParams::new(DEFAULT_STRONG.0, DEFAULT_STRONG.1).expect("valid default"),
            weak: PerceptionParams::new(DEFAULT_WEAK.0, DEFAULT_WEAK.1).expect("valid default"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub filtered: FilteredConfig,
    pub blur_hist: BlurHistogramConfig,
}

/// Replaces the builtin stoplist with inline words and/or a file of one
/// word per line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoplistConfig {
    pub words: Option<Vec<String>>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub methods: Vec<Method>,
    /// Defaults to `<out_dir>/manifest.jsonl`.
    pub manifest: Option<PathBuf>,
    /// Defaults to `<out_dir>/records.jsonl`.
    pub records: Option<PathBuf>,
    /// Cap on new samples per method in one invocation.
    pub max_samples: Option<usize>,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            methods: vec![Method::Vanilla, Method::Smsp],
            manifest: None,
            records: None,
            max_samples: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    pub text: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("config {}: {e}", path.display())))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn smsp_schedule(&self) -> Result<SmspSchedule, CliError> {
        build_schedule(self.schedule.k, self.schedule.strong, self.schedule.weak)
            .map_err(|e| CliError::config(format!("schedule: {e}")))
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.bench
            .manifest
            .clone()
            .unwrap_or_else(|| self.out_dir.join("manifest.jsonl"))
    }

    pub fn records_path(&self) -> PathBuf {
        self.bench
            .records
            .clone()
            .unwrap_or_else(|| self.out_dir.join("records.jsonl"))
    }

    pub fn stoplist(&self) -> Result<Stoplist, CliError> {
        let s = &self.stoplist;
        if s.words.is_none() && s.file.is_none() {
            return Ok(Stoplist::default());
        }
        let mut words = s.words.clone().unwrap_or_default();
        if let Some(f) = &s.file {
            let text = fs::read_to_string(f)
                .map_err(|e| CliError::config(format!("stoplist {}: {e}", f.display())))?;
            words.extend(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from));
        }
        Ok(Stoplist::new(words))
    }

    /// Checks everything `generate` depends on, without writing anything
    /// except an empty probe in an existing or newly created `out_dir`.
    pub fn validate_for_generate(&self) -> Result<(), CliError> {
        let font = match &self.dataset.font {
            Some(p) => Font::from_path(p).map_err(|e| CliError::config(format!("font {}: {e}", p.display())))?,
            None => Font::builtin(),
        };
        if self.dataset.charsets.is_empty() {
            return Err(CliError::config("dataset.charsets is empty"));
        }
        for cs in &self.dataset.charsets {
            let (_, entries) = cs.resolve().map_err(|e| CliError::config(e.to_string()))?;
            let missing = entries.iter().flat_map(|e| e.chars()).find(|&c| !c.is_whitespace() && !font.covers(c));
            if let Some(c) = missing {
                return Err(CliError::config(format!(
                    "font has no glyph for {c:?}; set dataset.font to a font that covers the charset"
                )));
            }
        }
        for kind in &self.dataset.backgrounds {
            self.dataset
                .texture_pair(*kind)
                .validate()
                .map_err(|e| CliError::config(format!("textures.{kind}: {e}")))?;
        }
        if self.dataset.scales.is_empty() {
            return Err(CliError::config("dataset.scales is empty"));
        }
        let (h, w) = self.dataset.canvas;
        if h == 0 || w == 0 {
            return Err(CliError::config("dataset.canvas must be at least 1x1"));
        }
        self.smsp_schedule()?;
        if let Some(sem) = &self.semantic {
            if !sem.images.is_dir() {
                return Err(CliError::config(format!("semantic.images {} is not a directory", sem.images.display())));
            }
            if !sem.truths.is_file() {
                return Err(CliError::config(format!("semantic.truths {} not found", sem.truths.display())));
            }
        }
        ensure_writable(&self.out_dir)
    }
}

pub fn ensure_writable(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))?;
    let probe = dir.join(".illuscope-write-probe");
    fs::write(&probe, b"").map_err(|e| CliError::config(format!("{} is not writable: {e}", dir.display())))?;
    let _ = fs::remove_file(probe);
    Ok(())
}
