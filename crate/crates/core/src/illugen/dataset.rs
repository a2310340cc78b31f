use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use super::compose::{compose_with_background, region_fidelity, Mask};
use super::manifest::{write_manifest, Background, HiddenType, SampleRecord};
use super::{CharsetSpec, GenError, ScaleClass, TextureKind, TexturePair};
use crate::imaging::{load_image, render_characters, save_png, Font};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const IMAGES_DIR: &str = "images";

/// Drops illusions whose character region is not recoverable from the
/// difference against the pure background texture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QualityFilter {
    pub enabled: bool,
    pub radius: usize,
    pub min_fidelity: f64,
}

impl Default for QualityFilter {
    fn default() -> Self {
        Self {
            enabled: true,
            radius: 12,
            min_fidelity: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpec {
    pub charsets: Vec<CharsetSpec>,
    pub backgrounds: Vec<TextureKind>,
    pub scales: Vec<ScaleClass>,
    /// `(H, W)`.
    pub canvas: (usize, usize),
    /// Per-kind overrides of the default texture parameters.
    pub textures: BTreeMap<TextureKind, TexturePair>,
    pub quality: QualityFilter,
    /// TrueType/OpenType font; the bundled Latin font when absent.
    pub font: Option<PathBuf>,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            charsets: vec![CharsetSpec::builtin("digits")],
            backgrounds: TextureKind::ALL.to_vec(),
            scales: ScaleClass::CLASSIFIED.to_vec(),
            canvas: (1000, 1000),
            textures: BTreeMap::new(),
            quality: QualityFilter::default(),
            font: None,
        }
    }
}

impl DatasetSpec {
    pub fn texture_pair(&self, kind: TextureKind) -> TexturePair {
        self.textures
            .get(&kind)
            .cloned()
            .unwrap_or_else(|| TexturePair::defaults(kind))
    }
}

#[derive(Debug, Clone)]
pub struct DatasetOutput {
    pub manifest_path: PathBuf,
    pub records: Vec<SampleRecord>,
    pub counts: CategoryCounts,
    /// Illusion ids dropped by the quality filter.
    pub rejected: Vec<String>,
}

/// Per-sample seed: the first 8 bytes of `SHA-256(master_le ‖ id)`.
pub fn sample_seed(master: u64, id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(id.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

struct Job {
    base_id: String,
    truth: String,
    hidden_type: HiddenType,
    scale: ScaleClass,
}

struct JobOutput {
    records: Vec<SampleRecord>,
    rejected: Vec<String>,
}

/// Renders every `(entry, scale)` original and its illusions, writes the
/// PNGs under `out_dir/images` and the manifest at `out_dir/manifest.jsonl`.
/// Output is identical for identical `(spec, seed, font)` regardless of
/// thread count. On error every file written by this call is removed.
pub fn build_dataset(spec: &DatasetSpec, out_dir: &Path, seed: u64) -> Result<DatasetOutput, GenError> {
    let font = match &spec.font {
        Some(p) => Font::from_path(p)?,
        None => Font::builtin(),
    };
    let mut jobs = Vec::new();
    let mut index = 0usize;
    for cs in &spec.charsets {
        let (hidden_type, entries) = cs.resolve()?;
        for truth in entries {
            if let Some(c) = truth.chars().find(|&c| !c.is_whitespace() && !font.covers(c)) {
                return Err(crate::imaging::ImageError::MissingGlyph(c).into());
            }
            for &scale in &spec.scales {
                jobs.push(Job {
                    base_id: format!("{hidden_type}-{index:04}-{}", scale.code()),
                    truth: truth.clone(),
                    hidden_type,
                    scale,
                });
            }
            index += 1;
        }
    }
    for kind in &spec.backgrounds {
        spec.texture_pair(*kind).validate()?;
    }

    let images_dir = out_dir.join(IMAGES_DIR);
    fs::create_dir_all(&images_dir).map_err(|e| GenError::io(&images_dir, e))?;

    let results: Vec<Result<JobOutput, GenError>> =
        jobs.par_iter().map(|job| run_job(job, spec, &font, out_dir, seed)).collect();

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    let mut failure = None;
    for r in results {
        match r {
            Ok(out) => {
                records.extend(out.records);
                rejected.extend(out.rejected);
            }
            Err(e) if failure.is_none() => failure = Some(e),
            Err(_) => {}
        }
    }
    let manifest_path = out_dir.join(MANIFEST_FILE);
    if failure.is_none() {
        if let Err(e) = write_manifest(&manifest_path, &records) {
            failure = Some(e);
        }
    }
    if let Some(e) = failure {
        for r in &records {
            let _ = fs::remove_file(out_dir.join(&r.image_path));
        }
        let _ = fs::remove_file(&manifest_path);
        // Only succeeds when nothing else lives there.
        let _ = fs::remove_dir(&images_dir);
        return Err(e);
    }
    let counts = category_counts(&records);
    Ok(DatasetOutput {
        manifest_path,
        records,
        counts,
        rejected,
    })
}

fn run_job(job: &Job, spec: &DatasetSpec, font: &Font, out_dir: &Path, master: u64) -> Result<JobOutput, GenError> {
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| {
        let (original, layout) = render_characters(&job.truth, spec.canvas, font, job.scale)?;
        let layout_json = json!({ "bbox": layout.bbox, "origin": layout.origin, "canvas": layout.canvas });
        let mut records = Vec::new();
        let mut rejected = Vec::new();

        let origin_id = format!("{}-origin", job.base_id);
        let rel = format!("{IMAGES_DIR}/{origin_id}.png");
        save_png(&original, &out_dir.join(&rel))?;
        written.push(out_dir.join(&rel));
        records.push(SampleRecord {
            seed: sample_seed(master, &origin_id),
            id: origin_id,
            truth: job.truth.clone(),
            hidden_type: job.hidden_type,
            background: Background::Origin,
            scale: job.scale,
            gen_params: json!({ "layout": layout_json }),
            image_path: rel,
        });

        let mask = Mask::from_original(&original);
        for &kind in &spec.backgrounds {
            let id = format!("{}-{kind}", job.base_id);
            let seed = sample_seed(master, &id);
            let pair = spec.texture_pair(kind);
            let comp = compose_with_background(&mask, kind, &pair.char_region, &pair.background, spec.canvas, seed)?;
            if spec.quality.enabled {
                let fidelity = region_fidelity(&comp.illusion, &comp.background, &mask, spec.quality.radius);
                if fidelity < spec.quality.min_fidelity {
                    rejected.push(id);
                    continue;
                }
            }
            let rel = format!("{IMAGES_DIR}/{id}.png");
            save_png(&comp.illusion, &out_dir.join(&rel))?;
            written.push(out_dir.join(&rel));
            records.push(SampleRecord {
                id,
                truth: job.truth.clone(),
                hidden_type: job.hidden_type,
                background: kind.into(),
                scale: job.scale,
                seed,
                gen_params: json!({
                    "kind": kind,
                    "p_c": pair.char_region,
                    "p_b": pair.background,
                    "layout": layout_json,
                }),
                image_path: rel,
            });
        }
        Ok(JobOutput { records, rejected })
    })();
    if result.is_err() {
        for p in &written {
            let _ = fs::remove_file(p);
        }
    }
    result
}

const SEMANTIC_THEMES: [&str; 3] = ["TC", "CC", "WV"];
const NOISE_COLUMNS: [(Background, &str); 5] = [
    (Background::Vg, "VG"),
    (Background::Gn, "GN"),
    (Background::Hd, "HD"),
    (Background::Ln, "LN"),
    (Background::Mn, "MN"),
];

/// Sample counts per `(hidden type, scale)` row and background column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryCounts {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<usize>)>,
}

impl CategoryCounts {
    pub fn total(&self) -> usize {
        self.rows.iter().flat_map(|(_, r)| r).sum()
    }

    pub fn get(&self, row: &str, column: &str) -> Option<usize> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.iter().find(|(r, _)| r == row).map(|(_, v)| v[c])
    }
}

impl fmt::Display for CategoryCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label_w = self.rows.iter().map(|(r, _)| r.len()).max().unwrap_or(0).max(8);
        write!(f, "{:<label_w$}", "")?;
        for c in &self.columns {
            write!(f, " {c:>6}")?;
        }
        writeln!(f)?;
        for (label, vals) in &self.rows {
            write!(f, "{label:<label_w$}")?;
            for v in vals {
                write!(f, " {v:>6}")?;
            }
            writeln!(f)?;
        }
        write!(f, "{:<label_w$} {:>6}", "total", self.total())
    }
}

fn theme_of(r: &SampleRecord) -> String {
    r.gen_params
        .get("theme")
        .and_then(|t| t.as_str())
        .map(|t| t.to_uppercase())
        .unwrap_or_else(|| "SEM".to_string())
}

/// Builds the counts table. Columns are Origin, the semantic themes (TC, CC,
/// WV plus any others found) and the five noise kinds.
pub fn category_counts(records: &[SampleRecord]) -> CategoryCounts {
    let mut columns = vec!["Origin".to_string()];
    columns.extend(SEMANTIC_THEMES.iter().map(|s| s.to_string()));
    let mut extra: Vec<String> = records
        .iter()
        .filter(|r| r.background == Background::SemanticImport)
        .map(theme_of)
        .filter(|t| !SEMANTIC_THEMES.contains(&t.as_str()))
        .collect();
    extra.sort();
    extra.dedup();
    columns.extend(extra);
    columns.extend(NOISE_COLUMNS.iter().map(|(_, c)| c.to_string()));

    let col_index: HashMap<&str, usize> = columns.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut rows: BTreeMap<(HiddenType, ScaleClass), Vec<usize>> = BTreeMap::new();
    for r in records {
        let column = match r.background {
            Background::Origin => "Origin".to_string(),
            Background::SemanticImport => theme_of(r),
            b => NOISE_COLUMNS.iter().find(|(k, _)| *k == b).expect("noise kind").1.to_string(),
        };
        let row = rows.entry((r.hidden_type, r.scale)).or_insert_with(|| vec![0; columns.len()]);
        row[col_index[column.as_str()]] += 1;
    }
    CategoryCounts {
        columns,
        rows: rows
            .into_iter()
            .map(|((ty, scale), v)| (format!("{ty}/{scale}"), v))
            .collect(),
    }
}

#[derive(Debug, Deserialize)]
struct TruthEntry {
    file: String,
    truth: String,
    #[serde(default)]
    hidden_type: Option<HiddenType>,
    #[serde(default)]
    theme: Option<String>,
    #[serde(default)]
    scale: Option<ScaleClass>,
    /// `(C_H, C_W)` of the hidden content, in image pixels.
    #[serde(default)]
    bbox: Option<(usize, usize)>,
}

/// Indexes externally produced semantic illusions. Every PNG/JPEG in
/// `images_dir` needs a line in `truths_file` (JSON lines with `file`,
/// `truth` and optional `hidden_type`, `theme`, `scale`, `bbox`). Image paths
/// are recorded relative to `manifest_root`; images are not modified.
pub fn import_semantic(
    images_dir: &Path,
    truths_file: &Path,
    manifest_root: &Path,
) -> Result<Vec<SampleRecord>, GenError> {
    let text = fs::read_to_string(truths_file).map_err(|e| GenError::io(truths_file, e))?;
    let mut truths = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: TruthEntry = serde_json::from_str(line).map_err(|e| GenError::Manifest {
            line: i + 1,
            message: format!("{}: {e}", truths_file.display()),
        })?;
        truths.insert(entry.file.clone(), entry);
    }

    let mut files: Vec<PathBuf> = fs::read_dir(images_dir)
        .map_err(|e| GenError::io(images_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
        })
        .collect();
    files.sort();

    let mut records = Vec::with_capacity(files.len());
    for path in files {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        let entry = truths.get(&name).ok_or_else(|| GenError::MissingTruth(name.clone()))?;
        let img = load_image(&path).map_err(|e| GenError::UnreadableImage {
            file: name.clone(),
            reason: e.to_string(),
        })?;
        let scale = entry.scale.unwrap_or_else(|| match entry.bbox {
            Some((c_h, c_w)) => ScaleClass::from_extent(c_h.max(c_w), img.width().min(img.height())),
            None => ScaleClass::Unclassified,
        });
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(&name);
        let rel = relative_path(&path, manifest_root);
        let mut params = serde_json::Map::new();
        if let Some(t) = &entry.theme {
            params.insert("theme".into(), json!(t));
        }
        if let Some(b) = entry.bbox {
            params.insert("bbox".into(), json!(b));
        }
        records.push(SampleRecord {
            id: format!("semantic-{stem}"),
            truth: entry.truth.clone(),
            hidden_type: entry.hidden_type.unwrap_or(HiddenType::Word),
            background: Background::SemanticImport,
            scale,
            seed: 0,
            gen_params: serde_json::Value::Object(params),
            image_path: rel,
        });
    }
    super::validate_records(&records)?;
    Ok(records)
}

fn relative_path(path: &Path, root: &Path) -> String {
    let abs = |p: &Path| fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf());
    let (p, r) = (abs(path), abs(root));
    let rel = match p.strip_prefix(&r) {
        Ok(rel) => rel.to_path_buf(),
        Err(_) => {
            // Walk up from the root until the path is underneath it.
            let mut ups = PathBuf::new();
            let mut base = r.as_path();
            loop {
                if let Ok(rest) = p.strip_prefix(base) {
                    break ups.join(rest);
                }
                match base.parent() {
                    Some(parent) => {
                        ups.push("..");
                        base = parent;
                    }
                    None => break p.clone(),
                }
            }
        }
    };
    rel.to_string_lossy().replace('\\', "/")
}
