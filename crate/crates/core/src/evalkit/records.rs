use std::collections::HashMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EvalError, PromptKind, Verdict};
use crate::perception::Ablation;

/// Flag carried by records whose request never produced a response.
pub const FLAG_CLIENT_ERROR: &str = "client_error";

/// How a sample is presented to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Vanilla,
    Cot,
    Filtered,
    BlurHist,
    Smsp,
    SmspAblation(Ablation),
}

impl Method {
    pub const STANDARD: [Method; 5] = [Method::Vanilla, Method::Cot, Method::Filtered, Method::BlurHist, Method::Smsp];

    pub fn prompt_kind(self) -> PromptKind {
        match self {
            Method::Vanilla | Method::Filtered | Method::BlurHist => PromptKind::Vanilla,
            Method::Cot => PromptKind::Cot,
            Method::Smsp | Method::SmspAblation(_) => PromptKind::Smsp,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Vanilla => f.write_str("vanilla"),
            Method::Cot => f.write_str("cot"),
            Method::Filtered => f.write_str("filtered"),
            Method::BlurHist => f.write_str("blur_hist"),
            Method::Smsp => f.write_str("smsp"),
            Method::SmspAblation(a) => write!(f, "smsp_{}", a.tag()),
        }
    }
}

impl FromStr for Method {
    type Err = EvalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let m = match s {
            "vanilla" => Method::Vanilla,
            "cot" => Method::Cot,
            "filtered" => Method::Filtered,
            "blur_hist" => Method::BlurHist,
            "smsp" => Method::Smsp,
            _ => s
                .strip_prefix("smsp_")
                .and_then(Ablation::parse_tag)
                .map(Method::SmspAblation)
                .ok_or_else(|| EvalError::UnknownMethod(s.to_string()))?,
        };
        Ok(m)
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Usage {
    #[serde(default)]
    pub input_tokens: Option<u64>,
    #[serde(default)]
    pub output_tokens: Option<u64>,
    #[serde(default)]
    pub latency_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub sample_id: String,
    pub method: Method,
    pub response: String,
    pub verdict: Verdict,
    pub judge_used: bool,
    #[serde(default)]
    pub usage: Usage,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl EvalRecord {
    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }
}

/// Reads a JSON-lines record file. A missing file yields no records; a
/// truncated final line (from an interrupted run) is skipped.
pub fn read_records(path: &Path) -> Result<Vec<EvalRecord>, EvalError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(EvalError::io(path, e)),
    };
    let lines: Vec<String> = BufReader::new(file)
        .lines()
        .collect::<Result<_, _>>()
        .map_err(|e| EvalError::io(path, e))?;
    let last = lines.iter().rposition(|l| !l.trim().is_empty());
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            Err(_) if Some(i) == last && !line.trim_end().ends_with('}') => {}
            Err(e) => {
                return Err(EvalError::Records {
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// Appends records and flushes, so completed work survives interruption.
pub fn append_records(path: &Path, records: &[EvalRecord]) -> Result<(), EvalError> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| EvalError::io(path, e))?;
    let mut buf = String::new();
    for r in records {
        buf.push_str(&serde_json::to_string(r).expect("records serialize"));
        buf.push('\n');
    }
    f.write_all(buf.as_bytes()).map_err(|e| EvalError::io(path, e))?;
    f.flush().map_err(|e| EvalError::io(path, e))
}

pub fn write_records(path: &Path, records: &[EvalRecord]) -> Result<(), EvalError> {
    let _ = std::fs::remove_file(path);
    append_records(path, records)
}

/// Keeps the last record per `(method, sample_id)`, in first-seen order.
pub fn dedupe_last_wins(records: &[EvalRecord]) -> Vec<EvalRecord> {
    let mut index: HashMap<(Method, &str), usize> = HashMap::new();
    let mut out: Vec<EvalRecord> = Vec::new();
    for r in records {
        match index.get(&(r.method, r.sample_id.as_str())) {
            Some(&i) => out[i] = r.clone(),
            None => {
                index.insert((r.method, r.sample_id.as_str()), out.len());
                out.push(r.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, verdict: Verdict) -> EvalRecord {
        EvalRecord {
            sample_id: id.into(),
            method: Method::Smsp,
            response: "x".into(),
            verdict,
            judge_used: false,
            usage: Usage::default(),
            flags: vec![],
        }
    }

    #[test]
    fn method_names_round_trip() {
        let all = [
            Method::Vanilla,
            Method::Cot,
            Method::Filtered,
            Method::BlurHist,
            Method::Smsp,
            Method::SmspAblation(Ablation::NoFilter),
            Method::SmspAblation(Ablation::NoRescale),
            Method::SmspAblation(Ablation::SingleVariant(2)),
        ];
        for m in all {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert_eq!(Method::SmspAblation(Ablation::SingleVariant(2)).to_string(), "smsp_single_2");
        assert!("magic".parse::<Method>().is_err());
    }

    #[test]
    fn jsonl_round_trip_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        assert!(read_records(&path).unwrap().is_empty());
        let recs = vec![rec("a", Verdict::Correct), rec("b", Verdict::Incorrect)];
        write_records(&path, &recs).unwrap();
        assert_eq!(read_records(&path).unwrap(), recs);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"sample_id\":\"c\",\"meth").unwrap();
        assert_eq!(read_records(&path).unwrap(), recs);
        let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&recs[0]).unwrap()).unwrap();
        assert_eq!(v["method"], "smsp");
        assert_eq!(v["verdict"], "Correct");
    }

    #[test]
    fn last_wins() {
        let recs = vec![rec("a", Verdict::Incorrect), rec("b", Verdict::Correct), rec("a", Verdict::Correct)];
        let d = dedupe_last_wins(&recs);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].verdict, Verdict::Correct);
    }
}
