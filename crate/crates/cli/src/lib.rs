//! Command-line workflows: generate illusion datasets, write multi-scale
//! variants, analyze spectra, benchmark chat endpoints and report accuracy.
//!
//! Every subcommand reads one JSON [`RunConfig`]; flags override the file.
//! Exit codes: 0 success, 2 configuration or input error, 3 data error,
//! 4 endpoint error.

pub mod commands;
mod config;
mod error;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use illuscope_core::evalkit::Method;

pub use commands::*;
pub use config::{
    ensure_writable, BaselineConfig, BenchSection, ReportSection, RunConfig, ScheduleConfig, SemanticImport,
    StoplistConfig,
};
pub use error::{CliError, ExitCode};

#[derive(Debug, Parser)]
#[command(name = "illuscope", version, about = "Hidden-character illusion datasets and multi-scale perception benchmarks")]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render the illusion dataset and its manifest.
    Generate {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write processed variants of an image or a directory of images.
    Process {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// smsp, filtered, blur_hist or ablation:<no_filter|no_rescale|single_variant:N>
        #[arg(long, default_value = "smsp")]
        mode: ProcessMode,
        /// Number of perception variants.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Spectral band shares of images, or of a manifest with origin pairs.
    Analyze {
        /// Image file, image directory or manifest (.jsonl).
        #[arg(long)]
        input: PathBuf,
        /// Band CSV; for manifests a `_pairs.csv` is written beside it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Query the target endpoint for every sample not yet scored.
    Bench {
        /// Repeat for several methods, e.g. vanilla, cot, smsp, smsp_no_filter.
        #[arg(long = "method")]
        methods: Vec<Method>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        records: Option<PathBuf>,
        /// Cap on new samples per method in this run.
        #[arg(long)]
        max_samples: Option<usize>,
    },
    /// Aggregate records into accuracy and cost tables.
    Report {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        text: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Rescore stored responses with the judge endpoint.
    JudgeOnly {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        records: Option<PathBuf>,
        /// Rescore every record instead of only judge failures.
        #[arg(long)]
        all: bool,
    },
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::Config as i32 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::Success as i32,
        Err(e) => {
            eprintln!("error: {e}");
            e.code as i32
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load_or_default(cli.config.as_deref())?;
    match cli.command {
        Command::Generate { out, seed } => {
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let g = cmd_generate(&cfg)?;
            println!("{}", g.counts);
            if !g.rejected.is_empty() {
                println!("rejected by quality filter: {}", g.rejected.join(", "));
            }
            println!("manifest: {}", g.manifest_path.display());
        }
        Command::Process { input, out, mode, k } => {
            if let Some(k) = k {
                cfg.schedule.k = k;
            }
            let written = cmd_process(&input, &out, mode, &cfg)?;
            println!("wrote {} files to {}", written.len(), out.display());
        }
        Command::Analyze { input, out } => {
            let a = cmd_analyze(&input)?;
            write_bands_csv(&a.bands, &out)?;
            println!("bands: {} ({} rows)", out.display(), a.bands.len());
            if !a.pairs.is_empty() {
                let p = pairs_path(&out);
                write_pairs_csv(&a.pairs, &p)?;
                let higher = a.pairs.iter().filter(|p| p.illusion_higher()).count();
                println!(
                    "pairs: {} ({higher}/{} illusions above their origin in mid+high share)",
                    p.display(),
                    a.pairs.len()
                );
            }
        }
        Command::Bench {
            methods,
            manifest,
            records,
            max_samples,
        } => {
            let o = BenchOverrides {
                methods,
                manifest,
                records,
                max_samples,
            };
            for (m, s) in cmd_bench(&cfg, &o)? {
                println!(
                    "{m}: {} samples, {} already scored, {} attempted, {} correct, {} failed",
                    s.total,
                    s.skipped,
                    s.attempted,
                    s.correct,
                    s.failures.len()
                );
                for (id, err) in &s.failures {
                    eprintln!("  {id}: {err}");
                }
            }
        }
        Command::Report {
            manifest,
            records,
            text,
            json,
        } => {
            let manifest = manifest.unwrap_or_else(|| cfg.manifest_path());
            let records = records.unwrap_or_else(|| cfg.records_path());
            let report = cmd_report(&manifest, &records)?;
            write_report(
                &report,
                text.as_deref().or(cfg.report.text.as_deref()),
                json.as_deref().or(cfg.report.json.as_deref()),
            )?;
            println!("{report}");
        }
        Command::JudgeOnly { manifest, records, all } => {
            let manifest = manifest.unwrap_or_else(|| cfg.manifest_path());
            let records = records.unwrap_or_else(|| cfg.records_path());
            let judge = build_judge(&cfg)?
                .ok_or_else(|| CliError::config("judge-only needs a `judge` endpoint in the config"))?;
            let s = cmd_judge_only(&cfg, &manifest, &records, all, &judge)?;
            println!("rescored {}, changed {}, still flagged {}", s.rescored, s.changed, s.still_flagged);
        }
    }
    Ok(())
}
