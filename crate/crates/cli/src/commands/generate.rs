use std::path::PathBuf;

use illuscope_core::illugen::{
    build_dataset, category_counts, import_semantic, validate_records, write_manifest, CategoryCounts, SampleRecord,
};

use crate::{CliError, RunConfig};

#[derive(Debug, Clone)]
pub struct GenerateOutput {
    pub manifest_path: PathBuf,
    pub records: Vec<SampleRecord>,
    pub counts: CategoryCounts,
    /// Ids dropped by the quality filter.
    pub rejected: Vec<String>,
}

/// Validates the configuration, builds the dataset under `out_dir` and
/// appends any configured semantic imports to the manifest.
pub fn cmd_generate(cfg: &RunConfig) -> Result<GenerateOutput, CliError> {
    cfg.validate_for_generate()?;
    let built = build_dataset(&cfg.dataset, &cfg.out_dir, cfg.seed)?;
    let mut records = built.records;
    if let Some(sem) = &cfg.semantic {
        records.extend(import_semantic(&sem.images, &sem.truths, &cfg.out_dir)?);
        validate_records(&records)?;
        write_manifest(&built.manifest_path, &records)?;
    }
    Ok(GenerateOutput {
        manifest_path: built.manifest_path,
        counts: category_counts(&records),
        records,
        rejected: built.rejected,
    })
}
