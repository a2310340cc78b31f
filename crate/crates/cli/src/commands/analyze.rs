use std::collections::HashMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use illuscope_core::illugen::{read_manifest, Background, BackgroundGroup, SampleRecord};
use illuscope_core::imaging::load_image;
use illuscope_core::spectral::{image_band_report, BandReport};
use rayon::prelude::*;

use super::collect_images;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct BandRow {
    /// Sample id for manifest input, file path otherwise.
    pub id: String,
    pub height: usize,
    pub width: usize,
    pub report: BandReport,
}

/// An illusion next to the origin image carrying the same hidden content.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRow {
    pub illusion_id: String,
    pub origin_id: String,
    pub background: Background,
    pub origin_mid_high: f64,
    pub illusion_mid_high: f64,
}

impl PairRow {
    pub fn illusion_higher(&self) -> bool {
        self.illusion_mid_high > self.origin_mid_high
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalyzeOutput {
    pub bands: Vec<BandRow>,
    pub pairs: Vec<PairRow>,
}

impl AnalyzeOutput {
    /// Fraction of pairs where the illusion has more mid+high energy.
    pub fn higher_fraction(&self) -> Option<f64> {
        (!self.pairs.is_empty())
            .then(|| self.pairs.iter().filter(|p| p.illusion_higher()).count() as f64 / self.pairs.len() as f64)
    }
}

fn is_manifest(path: &Path) -> bool {
    path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("jsonl"))
}

fn band_row(id: String, path: &Path) -> Result<BandRow, CliError> {
    let img = load_image(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok(BandRow {
        id,
        height: img.height(),
        width: img.width(),
        report: image_band_report(&img),
    })
}

/// Band reports for an image, a directory of images or a manifest. For a
/// manifest, every noise or semantic sample with an origin counterpart also
/// yields a pair row.
pub fn cmd_analyze(input: &Path) -> Result<AnalyzeOutput, CliError> {
    if !is_manifest(input) {
        let files = collect_images(input)?;
        let bands = files
            .par_iter()
            .map(|f| band_row(f.display().to_string(), f))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(AnalyzeOutput { bands, pairs: Vec::new() });
    }

    let records = read_manifest(input)?;
    if records.is_empty() {
        return Err(CliError::config(format!("{} has no samples", input.display())));
    }
    let root = input.parent().unwrap_or(Path::new("."));
    let bands = records
        .par_iter()
        .map(|r| band_row(r.id.clone(), &root.join(&r.image_path)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AnalyzeOutput {
        pairs: pair_rows(&records, &bands),
        bands,
    })
}

fn pair_rows(records: &[SampleRecord], bands: &[BandRow]) -> Vec<PairRow> {
    let origins: HashMap<&str, usize> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.background == Background::Origin)
        .map(|(i, r)| (r.base_id(), i))
        .collect();
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.background.group() != BackgroundGroup::Origin)
        .filter_map(|(i, r)| {
            let o = *origins.get(r.base_id())?;
            Some(PairRow {
                illusion_id: r.id.clone(),
                origin_id: records[o].id.clone(),
                background: r.background,
                origin_mid_high: bands[o].report.mid_high_share(),
                illusion_mid_high: bands[i].report.mid_high_share(),
            })
        })
        .collect()
}

fn csv_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::data(format!("{}: {e}", path.display()))
}

pub fn write_bands_csv(rows: &[BandRow], path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| csv_err(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header = vec!["id", "height", "width"];
    header.extend(BandReport::CSV_HEADER);
    header.push("mid_high_share");
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        let mut rec = vec![r.id.clone(), r.height.to_string(), r.width.to_string()];
        rec.extend(r.report.csv_fields());
        rec.push(format!("{:.6}", r.report.mid_high_share()));
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| csv_err(path, e))
}

pub fn write_pairs_csv(rows: &[PairRow], path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| csv_err(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record([
        "illusion_id",
        "origin_id",
        "background",
        "origin_mid_high",
        "illusion_mid_high",
        "illusion_higher",
    ])
    .map_err(|e| csv_err(path, e))?;
    for p in rows {
        w.write_record([
            p.illusion_id.clone(),
            p.origin_id.clone(),
            p.background.as_str().to_string(),
            format!("{:.6}", p.origin_mid_high),
            format!("{:.6}", p.illusion_mid_high),
            p.illusion_higher().to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| csv_err(path, e))
}

/// `bands.csv` becomes `bands_pairs.csv`.
pub fn pairs_path(bands_path: &Path) -> PathBuf {
    let stem = bands_path.file_stem().and_then(|s| s.to_str()).unwrap_or("bands");
    bands_path.with_file_name(format!("{stem}_pairs.csv"))
}
