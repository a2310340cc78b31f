//! Dataset manifest: one JSON object per line.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{GenError, ScaleClass, TextureKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HiddenType {
    Digit,
    Letter,
    Chinese,
    Word,
    Pattern,
}

impl HiddenType {
    pub const ALL: [HiddenType; 5] = [
        HiddenType::Digit,
        HiddenType::Letter,
        HiddenType::Chinese,
        HiddenType::Word,
        HiddenType::Pattern,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HiddenType::Digit => "digit",
            HiddenType::Letter => "letter",
            HiddenType::Chinese => "chinese",
            HiddenType::Word => "word",
            HiddenType::Pattern => "pattern",
        }
    }

    /// Noun used when asking a model about the hidden content.
    pub fn noun(self) -> &'static str {
        match self {
            HiddenType::Digit => "number",
            HiddenType::Letter => "letter",
            HiddenType::Chinese => "Chinese character",
            HiddenType::Word => "word",
            HiddenType::Pattern => "pattern",
        }
    }
}

impl fmt::Display for HiddenType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HiddenType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HiddenType::ALL
            .into_iter()
            .find(|h| h.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown hidden type {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Background {
    Origin,
    Vg,
    Gn,
    Hd,
    Ln,
    Mn,
    SemanticImport,
}

/// Coarse grouping used by the benchmark report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BackgroundGroup {
    Origin,
    Noise,
    Semantic,
}

impl fmt::Display for BackgroundGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackgroundGroup::Origin => "Origin",
            BackgroundGroup::Noise => "Noise",
            BackgroundGroup::Semantic => "Semantic",
        })
    }
}

impl Background {
    pub fn group(self) -> BackgroundGroup {
        match self {
            Background::Origin => BackgroundGroup::Origin,
            Background::SemanticImport => BackgroundGroup::Semantic,
            _ => BackgroundGroup::Noise,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Background::Origin => "origin",
            Background::Vg => "vg",
            Background::Gn => "gn",
            Background::Hd => "hd",
            Background::Ln => "ln",
            Background::Mn => "mn",
            Background::SemanticImport => "semantic_import",
        }
    }
}

impl From<TextureKind> for Background {
    fn from(k: TextureKind) -> Self {
        match k {
            TextureKind::Vg => Background::Vg,
            TextureKind::Gn => Background::Gn,
            TextureKind::Hd => Background::Hd,
            TextureKind::Ln => Background::Ln,
            TextureKind::Mn => Background::Mn,
        }
    }
}

impl fmt::Display for Background {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub truth: String,
    pub hidden_type: HiddenType,
    pub background: Background,
    pub scale: ScaleClass,
    pub seed: u64,
    pub gen_params: serde_json::Value,
    /// Relative to the manifest's directory.
    pub image_path: String,
}

impl SampleRecord {
    /// Id shared by an origin and all illusions built from it.
    pub fn base_id(&self) -> &str {
        match self.id.rfind('-') {
            Some(i) if self.background != Background::SemanticImport => &self.id[..i],
            _ => &self.id,
        }
    }
}

/// Schema checks that do not touch the file system.
pub fn validate_records(records: &[SampleRecord]) -> Result<(), GenError> {
    let mut seen = HashSet::new();
    for (i, r) in records.iter().enumerate() {
        let line = i + 1;
        let fail = |msg: &str| GenError::Manifest {
            line,
            message: msg.to_string(),
        };
        if r.id.is_empty() {
            return Err(fail("empty id"));
        }
        if !seen.insert(r.id.as_str()) {
            return Err(fail(&format!("duplicate id {:?}", r.id)));
        }
        if r.truth.is_empty() {
            return Err(fail("empty truth"));
        }
        if r.image_path.is_empty() || Path::new(&r.image_path).is_absolute() {
            return Err(fail("image_path must be a non-empty relative path"));
        }
    }
    Ok(())
}

/// Schema checks plus existence of every image relative to `root`.
pub fn validate_manifest(records: &[SampleRecord], root: &Path) -> Result<(), GenError> {
    validate_records(records)?;
    for (i, r) in records.iter().enumerate() {
        if !root.join(&r.image_path).is_file() {
            return Err(GenError::Manifest {
                line: i + 1,
                message: format!("missing image {}", r.image_path),
            });
        }
    }
    Ok(())
}

pub fn write_manifest(path: &Path, records: &[SampleRecord]) -> Result<(), GenError> {
    let file = File::create(path).map_err(|e| GenError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("records serialize");
        writeln!(out, "{line}").map_err(|e| GenError::io(path, e))?;
    }
    out.flush().map_err(|e| GenError::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Vec<SampleRecord>, GenError> {
    let file = File::open(path).map_err(|e| GenError::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| GenError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| GenError::Manifest {
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(rec);
    }
    validate_records(&records)?;
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str) -> SampleRecord {
        SampleRecord {
            id: id.into(),
            truth: "7".into(),
            hidden_type: HiddenType::Digit,
            background: Background::Vg,
            scale: ScaleClass::Large,
            seed: u64::MAX,
            gen_params: serde_json::json!({"kind": "vg"}),
            image_path: format!("images/{id}.png"),
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        let recs = vec![record("digit-0000-L-vg"), record("digit-0001-L-vg")];
        write_manifest(&path, &recs).unwrap();
        assert_eq!(read_manifest(&path).unwrap(), recs);
    }

    #[test]
    fn field_names() {
        let v = serde_json::to_value(record("a-b")).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        for k in ["id", "truth", "hidden_type", "background", "scale", "seed", "gen_params", "image_path"] {
            assert!(keys.contains(&k), "{k}");
        }
        assert_eq!(v["background"], "vg");
        assert_eq!(v["scale"], "Large");
        assert_eq!(v["hidden_type"], "digit");
        let imported = serde_json::to_value(Background::SemanticImport).unwrap();
        assert_eq!(imported, "semantic_import");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let recs = vec![record("x-1"), record("x-1")];
        assert!(matches!(validate_records(&recs), Err(GenError::Manifest { line: 2, .. })));
    }

    #[test]
    fn base_ids() {
        assert_eq!(record("digit-0003-L-vg").base_id(), "digit-0003-L");
        let mut o = record("digit-0003-L-origin");
        o.background = Background::Origin;
        assert_eq!(o.base_id(), "digit-0003-L");
    }
}
