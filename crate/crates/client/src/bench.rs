//! Resumable benchmark runs over a dataset manifest.

use std::collections::HashSet;
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use illuscope_core::evalkit::{
    append_records, read_records, score, EvalError, EvalRecord, Judge, Method, PromptSet, Stoplist, Usage,
    Verdict, FLAG_CLIENT_ERROR,
};
use illuscope_core::illugen::SampleRecord;
use illuscope_core::imaging::load_image;
use illuscope_core::perception::{
    ablate, baseline_blur_histogram, baseline_filtered, build_smsp_input, BlurHistogramConfig, FilteredConfig,
    PerceptionError,
};
use illuscope_core::{RasterImage, SmspSchedule};
use thiserror::Error;

use crate::{ClientError, VisionClient, VisionRequest};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("sample {sample}: {message}")]
    Data { sample: String, message: String },
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Records(#[from] EvalError),
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub method: Method,
    pub schedule: SmspSchedule,
    pub prompts: PromptSet,
    pub filtered: FilteredConfig,
    pub blur_hist: BlurHistogramConfig,
    pub stoplist: Stoplist,
    /// Stop after this many new samples.
    pub max_new: Option<usize>,
}

impl BenchOptions {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            schedule: SmspSchedule::default_schedule(),
            prompts: PromptSet::default(),
            filtered: FilteredConfig::default(),
            blur_hist: BlurHistogramConfig::default(),
            stoplist: Stoplist::default(),
            max_new: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchSummary {
    pub total: usize,
    /// Already scored by an earlier run.
    pub skipped: usize,
    pub attempted: usize,
    pub correct: usize,
    /// `(sample_id, error)` for samples recorded with the client-error flag.
    pub failures: Vec<(String, String)>,
}

/// The images a method sends for one sample, in wire order.
pub fn prepare_images(
    img: &RasterImage,
    method: Method,
    schedule: &SmspSchedule,
    filtered: &FilteredConfig,
    blur_hist: &BlurHistogramConfig,
) -> Result<Vec<RasterImage>, PerceptionError> {
    Ok(match method {
        Method::Vanilla | Method::Cot => vec![img.clone()],
        Method::Filtered => vec![baseline_filtered(img, filtered)],
        Method::BlurHist => vec![baseline_blur_histogram(img, blur_hist)],
        Method::Smsp => build_smsp_input(img, schedule)?.images,
        Method::SmspAblation(a) => ablate(img, a, schedule)?.images,
    })
}

/// Runs `opts.method` over every manifest sample not yet scored in
/// `records_path`, appending one record per sample as it completes.
/// Samples whose earlier record carries the client-error flag are retried.
/// Authentication failures abort the run; other client failures are
/// recorded as flagged `Incorrect` records and the run continues.
pub fn run_bench(
    manifest: &[SampleRecord],
    manifest_root: &Path,
    records_path: &Path,
    opts: &BenchOptions,
    client: &VisionClient,
    judge: Option<&dyn Judge>,
) -> Result<BenchSummary, BenchError> {
    let done: HashSet<String> = read_records(records_path)?
        .into_iter()
        .filter(|r| r.method == opts.method && !r.has_flag(FLAG_CLIENT_ERROR))
        .map(|r| r.sample_id)
        .collect();
    let mut pending: Vec<&SampleRecord> = manifest.iter().filter(|s| !done.contains(&s.id)).collect();
    let skipped = manifest.len() - pending.len();
    if let Some(n) = opts.max_new {
        pending.truncate(n);
    }

    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let fatal: Mutex<Option<BenchError>> = Mutex::new(None);
    let sink = Mutex::new(());
    let summary = Mutex::new(BenchSummary {
        total: manifest.len(),
        skipped,
        ..BenchSummary::default()
    });
    let workers = client.config().max_concurrent_requests.min(pending.len()).max(1);

    let fail = |e: BenchError| {
        stop.store(true, Ordering::SeqCst);
        fatal.lock().expect("bench lock").get_or_insert(e);
    };
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| {
                while !stop.load(Ordering::SeqCst) {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(sample) = pending.get(i) else { break };
                    let record = match evaluate(sample, manifest_root, opts, client, judge) {
                        Ok(r) => r,
                        Err(e) => {
                            fail(e);
                            break;
                        }
                    };
                    {
                        let _guard = sink.lock().expect("bench lock");
                        if let Err(e) = append_records(records_path, std::slice::from_ref(&record)) {
                            drop(_guard);
                            fail(e.into());
                            break;
                        }
                    }
                    let mut sum = summary.lock().expect("bench lock");
                    sum.attempted += 1;
                    if record.verdict == Verdict::Correct {
                        sum.correct += 1;
                    }
                    if record.has_flag(FLAG_CLIENT_ERROR) {
                        sum.failures.push((record.sample_id.clone(), record.response.clone()));
                    }
                }
            });
        }
    });
    if let Some(e) = fatal.into_inner().expect("bench lock") {
        return Err(e);
    }
    let mut sum = summary.into_inner().expect("bench lock");
    sum.failures.sort();
    Ok(sum)
}

fn evaluate(
    sample: &SampleRecord,
    root: &Path,
    opts: &BenchOptions,
    client: &VisionClient,
    judge: Option<&dyn Judge>,
) -> Result<EvalRecord, BenchError> {
    let data_err = |message: String| BenchError::Data {
        sample: sample.id.clone(),
        message,
    };
    let img = load_image(&root.join(&sample.image_path)).map_err(|e| data_err(e.to_string()))?;
    let images = prepare_images(&img, opts.method, &opts.schedule, &opts.filtered, &opts.blur_hist)
        .map_err(|e| data_err(e.to_string()))?;
    let prompt = opts
        .prompts
        .render(opts.method.prompt_kind(), sample.hidden_type.noun(), images.len())
        .map_err(|e| data_err(e.to_string()))?;

    match client.send(&VisionRequest::new(prompt, images)) {
        Ok(resp) => {
            let scored = score(&sample.truth, &resp.text, &opts.stoplist, judge, &opts.prompts);
            Ok(EvalRecord {
                sample_id: sample.id.clone(),
                method: opts.method,
                response: resp.text,
                verdict: scored.verdict,
                judge_used: scored.judge_used,
                usage: Usage {
                    input_tokens: resp.input_tokens,
                    output_tokens: resp.output_tokens,
                    latency_s: resp.latency_s,
                },
                flags: scored.flags,
            })
        }
        Err(e @ ClientError::AuthFailed { .. }) => Err(e.into()),
        Err(e) => Ok(EvalRecord {
            sample_id: sample.id.clone(),
            method: opts.method,
            // The error text stands in for the missing response.
            response: e.to_string(),
            verdict: Verdict::Incorrect,
            judge_used: false,
            usage: Usage::default(),
            flags: vec![FLAG_CLIENT_ERROR.to_string()],
        }),
    }
}
