use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::{dedupe_last_wins, EvalError, EvalRecord, Method, Verdict};
use crate::illugen::{BackgroundGroup, SampleRecord, ScaleClass};

pub const GROUPS: [BackgroundGroup; 3] = [BackgroundGroup::Origin, BackgroundGroup::Noise, BackgroundGroup::Semantic];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCell {
    pub correct: usize,
    pub total: usize,
    /// Percentage in `[0, 100]`.
    pub accuracy: f64,
}

impl AccuracyCell {
    pub fn new(correct: usize, total: usize) -> Option<Self> {
        (total > 0).then(|| AccuracyCell {
            correct,
            total,
            accuracy: 100.0 * correct as f64 / total as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: BackgroundGroup,
    pub large: Option<AccuracyCell>,
    pub medium: Option<AccuracyCell>,
    pub small: Option<AccuracyCell>,
    /// Sample-weighted over the three scale cells.
    pub average: Option<AccuracyCell>,
}

impl GroupRow {
    pub fn cells(&self) -> [Option<AccuracyCell>; 4] {
        [self.large, self.medium, self.small, self.average]
    }

    pub fn scale(&self, s: ScaleClass) -> Option<AccuracyCell> {
        match s {
            ScaleClass::Large => self.large,
            ScaleClass::Medium => self.medium,
            ScaleClass::Small => self.small,
            ScaleClass::Unclassified => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    pub samples: usize,
    /// Means over records that report the field.
    pub mean_input_tokens: Option<f64>,
    pub mean_output_tokens: Option<f64>,
    pub mean_latency_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub rows: Vec<GroupRow>,
    pub cost: CostSummary,
    /// Records on samples of unclassified scale, left out of every cell.
    pub unclassified: usize,
    pub judge_calls: usize,
    pub flagged: BTreeMap<String, usize>,
}

impl MethodReport {
    pub fn row(&self, group: BackgroundGroup) -> &GroupRow {
        self.rows.iter().find(|r| r.group == group).expect("all groups present")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub methods: Vec<MethodReport>,
}

impl BenchReport {
    pub fn method(&self, m: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|r| r.method == m)
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Accuracy per method over background group × scale. Records are
/// deduplicated per `(method, sample_id)` with the last one winning.
pub fn aggregate(records: &[EvalRecord], manifest: &[SampleRecord]) -> Result<BenchReport, EvalError> {
    let samples: HashMap<&str, &SampleRecord> = manifest.iter().map(|s| (s.id.as_str(), s)).collect();
    let records = dedupe_last_wins(records);
    let mut by_method: BTreeMap<String, (Method, Vec<&EvalRecord>)> = BTreeMap::new();
    for r in &records {
        if !samples.contains_key(r.sample_id.as_str()) {
            return Err(EvalError::UnknownSample(r.sample_id.clone()));
        }
        by_method.entry(r.method.to_string()).or_insert_with(|| (r.method, Vec::new())).1.push(r);
    }

    let mut methods: Vec<MethodReport> = by_method
        .into_values()
        .map(|(method, recs)| {
            let mut tally: HashMap<(BackgroundGroup, ScaleClass), (usize, usize)> = HashMap::new();
            let mut unclassified = 0;
            let mut flagged = BTreeMap::new();
            for r in &recs {
                let s = samples[r.sample_id.as_str()];
                for f in &r.flags {
                    *flagged.entry(f.clone()).or_insert(0) += 1;
                }
                if s.scale == ScaleClass::Unclassified {
                    unclassified += 1;
                    continue;
                }
                let t = tally.entry((s.background.group(), s.scale)).or_default();
                t.1 += 1;
                if r.verdict == Verdict::Correct {
                    t.0 += 1;
                }
            }
            let cell = |g, s| tally.get(&(g, s)).and_then(|&(c, n)| AccuracyCell::new(c, n));
            let rows = GROUPS
                .iter()
                .map(|&g| {
                    let (c, n) = ScaleClass::CLASSIFIED
                        .iter()
                        .filter_map(|&s| tally.get(&(g, s)))
                        .fold((0, 0), |(c, n), &(dc, dn)| (c + dc, n + dn));
                    GroupRow {
                        group: g,
                        large: cell(g, ScaleClass::Large),
                        medium: cell(g, ScaleClass::Medium),
                        small: cell(g, ScaleClass::Small),
                        average: AccuracyCell::new(c, n),
                    }
                })
                .collect();
            let cost = CostSummary {
                samples: recs.len(),
                mean_input_tokens: mean(recs.iter().filter_map(|r| r.usage.input_tokens).map(|t| t as f64)),
                mean_output_tokens: mean(recs.iter().filter_map(|r| r.usage.output_tokens).map(|t| t as f64)),
                mean_latency_s: mean(recs.iter().map(|r| r.usage.latency_s)),
            };
            MethodReport {
                method,
                rows,
                cost,
                unclassified,
                judge_calls: recs.iter().filter(|r| r.judge_used).count(),
                flagged,
            }
        })
        .collect();
    let order = |m: &Method| Method::STANDARD.iter().position(|s| s == m).unwrap_or(Method::STANDARD.len());
    methods.sort_by(|a, b| order(&a.method).cmp(&order(&b.method)).then(a.method.to_string().cmp(&b.method.to_string())));
    Ok(BenchReport { methods })
}

fn fmt_cell(c: Option<AccuracyCell>) -> String {
    c.map_or_else(|| "-".to_string(), |c| format!("{:.1}", c.accuracy))
}

impl fmt::Display for BenchReport {
    /// Accuracy table (Origin / Noise / Semantic × L M S Avg) followed by a
    /// cost table.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name_w = self
            .methods
            .iter()
            .map(|m| m.method.to_string().len())
            .max()
            .unwrap_or(0)
            .max("Method".len());
        let mut head1 = format!("{:<name_w$}", "");
        let mut head2 = format!("{:<name_w$}", "Method");
        for g in GROUPS {
            let _ = write!(head1, " | {:^27}", g.to_string());
            let _ = write!(head2, " | {:>6}{:>7}{:>7}{:>7}", "L", "M", "S", "Avg");
        }
        writeln!(f, "{head1}")?;
        writeln!(f, "{head2}")?;
        writeln!(f, "{}", "-".repeat(head2.chars().count()))?;
        for m in &self.methods {
            write!(f, "{:<name_w$}", m.method.to_string())?;
            for g in GROUPS {
                let [l, md, s, avg] = m.row(g).cells().map(fmt_cell);
                write!(f, " | {l:>6}{md:>7}{s:>7}{avg:>7}")?;
            }
            writeln!(f)?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "{:<name_w$} | {:>8} | {:>13} | {:>14} | {:>11}",
            "Method", "Samples", "Input tokens", "Output tokens", "Latency (s)"
        )?;
        for m in &self.methods {
            let opt = |v: Option<f64>, p: usize| v.map_or_else(|| "-".to_string(), |v| format!("{v:.p$}"));
            writeln!(
                f,
                "{:<name_w$} | {:>8} | {:>13} | {:>14} | {:>11}",
                m.method.to_string(),
                m.cost.samples,
                opt(m.cost.mean_input_tokens, 0),
                opt(m.cost.mean_output_tokens, 0),
                opt(m.cost.mean_latency_s, 2)
            )?;
        }
        Ok(())
    }
}
