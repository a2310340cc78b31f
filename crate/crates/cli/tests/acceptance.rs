//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use illuscope::{cmd_analyze, cmd_bench, cmd_generate, cmd_report, BenchOverrides, RunConfig};
use illuscope_core::evalkit::{cost_model, fit_linear, score, EvalError, Method, PromptSet, Stoplist, Verdict};
use illuscope_core::illugen::{
    read_manifest, write_manifest, BackgroundGroup, CharsetSpec, HiddenType, ScaleClass, TextureKind,
};
use illuscope_core::perception::{build_schedule, build_smsp_input, content_region, perceive_plane, Stages};
use illuscope_core::spectral::{energy_curve, fft2d_centered, ifft2d_magnitude};
use illuscope_core::{Channels, FloatPlane, PerceptionParams, RasterImage};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> FloatPlane {
    FloatPlane::new(w, h, (0..w * h).map(|_| rng.random_range(0.0..255.0)).collect()).unwrap()
}

/// Direct DFT with the DC term stored at `(⌊H/2⌋, ⌊W/2⌋)`.
fn direct_dft_centered(p: &FloatPlane) -> Vec<Complex64> {
    let (h, w) = p.dims();
    let mut out = vec![Complex64::new(0.0, 0.0); h * w];
    for row in 0..h {
        let u = row as f64 - (h / 2) as f64;
        for col in 0..w {
            let v = col as f64 - (w / 2) as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..h {
                for x in 0..w {
                    let phase = -2.0 * PI * (u * y as f64 / h as f64 + v * x as f64 / w as f64);
                    acc += Complex64::from_polar(p.get(x, y), phase);
                }
            }
            out[row * w + col] = acc;
        }
    }
    out
}

fn fft_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_fwd, mut worst_rt) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let p = random_plane(&mut rng, 16, 16);
        let spec = fft2d_centered(&p);
        let oracle = direct_dft_centered(&p);
        for (row, chunk) in oracle.chunks(16).enumerate() {
            for (col, c) in chunk.iter().enumerate() {
                worst_fwd = worst_fwd.max((spec.get(row, col) - c).norm());
            }
        }
        let back = ifft2d_magnitude(&spec);
        for (a, b) in back.values().iter().zip(p.values()) {
            worst_rt = worst_rt.max((a - b).abs());
        }
    }
    let t = start.elapsed();
    check(
        worst_fwd <= 1e-6 && worst_rt <= 1e-6 && t < Duration::from_secs(5),
        format!("max coeff err {worst_fwd:.2e}, max round-trip err {worst_rt:.2e}, {:.2}s", t.as_secs_f64()),
    )
}

fn parseval() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (h, w) = (rng.random_range(1..=128), rng.random_range(1..=128));
        let p = random_plane(&mut rng, w, h);
        let lhs = energy_curve(&fft2d_centered(&p)).total();
        let rhs = (h * w) as f64 * p.values().iter().map(|v| v * v).sum::<f64>();
        worst = worst.max(((lhs - rhs) / rhs).abs());
    }
    check(worst <= 1e-9, format!("max relative err {worst:.2e}"))
}

fn schedule_fixture() -> Outcome {
    let s = build_schedule(
        3,
        PerceptionParams::new(0.012, 0.1).unwrap(),
        PerceptionParams::new(0.05, 0.4).unwrap(),
    )
    .unwrap();
    let mid = s.derived()[1];
    let want = 0.012 * (0.05f64 / 0.012).sqrt();
    let err = (mid.lambda() - want).abs();
    check(
        err <= 1e-9 && mid.scale() == 0.2,
        format!("lambda2 {:.12} (err {err:.1e}), s2 {}", mid.lambda(), mid.scale()),
    )
}

/// Area-weighted mean over each output cell's footprint.
fn box_resize(p: &FloatPlane, nh: usize, nw: usize) -> Vec<f64> {
    let (h, w) = p.dims();
    let weights = |src: usize, dst: usize, i: usize| -> Vec<(usize, f64)> {
        let step = src as f64 / dst as f64;
        let (lo, hi) = (i as f64 * step, (i + 1) as f64 * step);
        (lo.floor() as usize..(hi.ceil() as usize).min(src))
            .map(|j| (j, (hi.min(j as f64 + 1.0) - lo.max(j as f64)).max(0.0) / step))
            .collect()
    };
    let mut out = Vec::with_capacity(nh * nw);
    for i in 0..nh {
        let wy = weights(h, nh, i);
        for j in 0..nw {
            let wx = weights(w, nw, j);
            let mut acc = 0.0;
            for &(y, a) in &wy {
                for &(x, b) in &wx {
                    acc += a * b * p.get(x, y);
                }
            }
            out.push(acc);
        }
    }
    out
}

/// Low-pass via separable DFTs, magnitude, box downscale, white padding.
fn hand_perceive(p: &FloatPlane, lambda: f64, scale: f64) -> FloatPlane {
    let (h, w) = p.dims();
    let dft = |data: &mut Vec<Complex64>, n: usize, stride: usize, count: usize, step: usize, sign: f64| {
        for c in 0..count {
            let line: Vec<Complex64> = (0..n).map(|k| data[c * step + k * stride]).collect();
            for f in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, v) in line.iter().enumerate() {
                    acc += v * Complex64::from_polar(1.0, sign * 2.0 * PI * (f * k) as f64 / n as f64);
                }
                data[c * step + f * stride] = acc;
            }
        }
    };
    let mut buf: Vec<Complex64> = p.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft(&mut buf, w, 1, h, w, -1.0);
    dft(&mut buf, h, w, w, 1, -1.0);
    let cutoff = h.min(w) as f64 * lambda;
    for fy in 0..h {
        for fx in 0..w {
            let du = if fy >= h - h / 2 { fy as f64 - h as f64 } else { fy as f64 };
            let dv = if fx >= w - w / 2 { fx as f64 - w as f64 } else { fx as f64 };
            if (du * du + dv * dv).sqrt() > cutoff {
                buf[fy * w + fx] = Complex64::new(0.0, 0.0);
            }
        }
    }
    dft(&mut buf, w, 1, h, w, 1.0);
    dft(&mut buf, h, w, w, 1, 1.0);
    let mag = FloatPlane::new(w, h, buf.iter().map(|c| c.norm() / (h * w) as f64).collect()).unwrap();
    let (sh, sw) = ((h as f64 * scale + 1e-9).floor() as usize, (w as f64 * scale + 1e-9).floor() as usize);
    let small = box_resize(&mag, sh, sw);
    let (top, left) = ((h - sh) / 2, (w - sw) / 2);
    let mut out = vec![255.0; h * w];
    for y in 0..sh {
        for x in 0..sw {
            out[(top + y) * w + left + x] = small[y * sw + x];
        }
    }
    FloatPlane::new(w, h, out).unwrap()
}

fn perception_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = random_plane(&mut rng, 64, 64);
        let (lambda, scale) = (rng.random_range(0.01..0.5), rng.random_range(0.1..0.9));
        let got = perceive_plane(&p, PerceptionParams::new(lambda, scale).unwrap(), Stages::ALL).unwrap();
        let want = hand_perceive(&p, lambda, scale);
        for (a, b) in got.values().iter().zip(want.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= 1e-6, format!("max deviation {worst:.2e} over 50 images"))
}

fn spectral_diagnosis(tmp: &Path) -> Outcome {
    let mut cfg = RunConfig {
        seed: 5,
        out_dir: tmp.join("diag"),
        ..RunConfig::default()
    };
    cfg.dataset.charsets = vec![
        CharsetSpec::builtin("digits"),
        CharsetSpec::inline(HiddenType::Letter, "ABCDEFGHIJ".chars().map(String::from).collect()),
    ];
    cfg.dataset.backgrounds = TextureKind::ALL.to_vec();
    cfg.dataset.scales = vec![ScaleClass::Large];
    cfg.dataset.canvas = (256, 256);
    cfg.dataset.quality.enabled = false;
    let g = cmd_generate(&cfg).unwrap();
    let a = cmd_analyze(&g.manifest_path).unwrap();
    let higher = a.pairs.iter().filter(|p| p.illusion_higher()).count();
    let mut per_kind: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for p in &a.pairs {
        let e = per_kind.entry(p.background.as_str().to_string()).or_default();
        e.1 += 1;
        e.0 += p.illusion_higher() as usize;
    }
    let kinds: Vec<String> = per_kind.iter().map(|(k, (h, n))| format!("{k} {h}/{n}")).collect();
    check(
        a.pairs.len() == 100 && higher * 100 >= 95 * a.pairs.len(),
        format!("{higher}/{} pairs illusion > origin ({})", a.pairs.len(), kinds.join(", ")),
    )
}

fn tuple_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let strong = PerceptionParams::new(0.012, 0.1).unwrap();
    let weak = PerceptionParams::new(0.05, 0.4).unwrap();
    let (mut ok, mut total) = (0, 0);
    for _ in 0..50 {
        let (h, w) = (rng.random_range(48..=160), rng.random_range(48..=160));
        let ch = if rng.random_bool(0.5) { Channels::Rgb } else { Channels::Gray };
        let data = (0..h * w * ch.count()).map(|_| rng.random()).collect();
        let img = RasterImage::new(w, h, ch, data).unwrap();
        for k in 2..=6 {
            total += 1;
            let s = build_schedule(k, strong, weak).unwrap();
            let t = build_smsp_input(&img, &s).unwrap();
            let areas: Vec<usize> = s
                .derived()
                .iter()
                .map(|&p| {
                    let (_, _, sh, sw) = content_region((h, w), p).unwrap();
                    sh * sw
                })
                .collect();
            let padding_white = s.derived().iter().zip(&t.images[1..]).all(|(&p, v)| {
                let (top, left, sh, sw) = content_region((h, w), p).unwrap();
                (0..h).all(|y| {
                    (0..w).all(|x| {
                        let inside = (top..top + sh).contains(&y) && (left..left + sw).contains(&x);
                        inside || (0..ch.count()).all(|c| v.get(x, y, c) == 255)
                    })
                })
            });
            if t.len() == k + 1
                && t.images[0] == img
                && t.images.iter().all(|v| v.dims() == img.dims() && v.channels() == ch)
                && areas.windows(2).all(|a| a[0] < a[1])
                && padding_white
            {
                ok += 1;
            }
        }
    }
    check(ok == total, format!("{ok}/{total} (image, K) cases satisfy the contract"))
}

fn evaluator_fixture() -> Outcome {
    // (truth, response, scripted judge reply or None if the judge must not be asked, expected)
    let cases: [(&str, &str, Option<&str>, Verdict); 12] = [
        ("5", "Looking at the image carefully, I can identify the hidden number: 5.", Some("Correct"), Verdict::Correct),
        ("animal", "The hidden word in the image is \"ANIMAL\".", None, Verdict::Correct),
        ("A", "The hidden letter in the image is B.", Some("Incorrect"), Verdict::Incorrect),
        ("我", "The hidden Chinese character in the image is 我.", Some("Correct"), Verdict::Correct),
        ("你好吗", "The hidden Chinese characters in the image are 我好嘛.", None, Verdict::Incorrect),
        ("cat", "I see a dog made of stripes.", None, Verdict::Incorrect),
        ("train", "The word is TRAIN.", None, Verdict::Correct),
        ("apple", "It appears to spell 'Apple'.", None, Verdict::Correct),
        ("8", "The number is 3.", None, Verdict::Incorrect),
        ("8", "I count 18 stripes; the digit is 6.", Some("Incorrect"), Verdict::Incorrect),
        ("the", "The hidden word is THE.", Some("Evaluation: Correct"), Verdict::Correct),
        ("ok", "It says OK.", Some("Correct"), Verdict::Correct),
    ];
    let stoplist = Stoplist::default();
    let prompts = PromptSet::default();
    let mut passed = 0;
    let mut misses = Vec::new();
    for (i, &(truth, response, reply, expected)) in cases.iter().enumerate() {
        let asked = AtomicBool::new(false);
        let judge = |p: &str| -> Result<String, EvalError> {
            asked.store(true, Ordering::SeqCst);
            assert!(p.contains(&format!("Ground Truth Answer: {truth}\nModel Response: {response}\nEvaluation:")));
            reply.map(String::from).ok_or_else(|| EvalError::JudgeUnavailable("not scripted".into()))
        };
        let s = score(truth, response, &stoplist, Some(&judge), &prompts);
        let asked = asked.load(Ordering::SeqCst);
        if s.verdict == expected && asked == reply.is_some() && s.judge_used == reply.is_some() {
            passed += 1;
        } else {
            misses.push(i + 1);
        }
    }
    check(passed == cases.len(), format!("{passed}/{} cases, mismatches {misses:?}", cases.len()))
}

fn cost_linearity() -> Outcome {
    let columns: [(usize, u64); 6] = [(0, 1023), (2, 1986), (3, 2949), (4, 3912), (5, 4875), (6, 5838)];
    let pts: Vec<(f64, f64)> = columns.iter().map(|&(k, t)| (k.max(1) as f64, t as f64)).collect();
    let (slope, intercept) = fit_linear(&pts).unwrap();
    let (per_image, text) = (slope.round() as u64, intercept.round() as u64);
    let exact = columns.iter().all(|&(k, t)| cost_model(k, per_image, text) == t);
    check(
        (slope - 963.0).abs() < 1e-9 && exact,
        format!("slope {slope:.6}, intercept {intercept:.6}, all columns reproduced: {exact}"),
    )
}

fn sha_of_tree(dir: &Path) -> String {
    let mut files: Vec<_> = fs::read_dir(dir.join("images")).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    let mut h = Sha256::new();
    for f in files {
        h.update(f.file_name().unwrap().to_string_lossy().as_bytes());
        h.update(fs::read(f).unwrap());
    }
    format!("{:x}", h.finalize())
}

fn determinism(tmp: &Path) -> Outcome {
    let run = |name: &str| {
        let mut cfg = RunConfig {
            seed: 2024,
            out_dir: tmp.join(name),
            ..RunConfig::default()
        };
        cfg.dataset.canvas = (256, 256);
        cfg.dataset.scales = vec![ScaleClass::Large, ScaleClass::Small];
        let g = cmd_generate(&cfg).unwrap();
        let manifest = format!("{:x}", Sha256::digest(fs::read(&g.manifest_path).unwrap()));
        (manifest, sha_of_tree(&cfg.out_dir), g.records.len())
    };
    let (m1, t1, n) = run("det-a");
    let (m2, t2, _) = run("det-b");
    check(
        m1 == m2 && t1 == t2,
        format!("{n} samples, manifest sha256 {}.., images equal: {}", &m1[..16], t1 == t2),
    )
}

/// Runs only when `ILLUSCOPE_LIVE_CONFIG` names a config with a real target.
fn live_check(tmp: &Path) -> Outcome {
    let Ok(path) = std::env::var("ILLUSCOPE_LIVE_CONFIG") else {
        return Outcome::Skip("set ILLUSCOPE_LIVE_CONFIG to a config with endpoint credentials".into());
    };
    let mut cfg = RunConfig::load(Path::new(&path)).unwrap();
    cfg.out_dir = tmp.join("live");
    let g = cmd_generate(&cfg).unwrap();
    let noise: Vec<_> = read_manifest(&g.manifest_path)
        .unwrap()
        .into_iter()
        .filter(|r| r.background.group() == BackgroundGroup::Noise)
        .collect();
    if noise.len() < 50 {
        return Outcome::Fail(format!("config yields only {} noise samples, need 50", noise.len()));
    }
    let manifest = cfg.out_dir.join("noise.jsonl");
    write_manifest(&manifest, &noise).unwrap();
    let records = cfg.out_dir.join("live-records.jsonl");
    let o = BenchOverrides {
        methods: vec![Method::Vanilla, Method::Smsp],
        manifest: Some(manifest.clone()),
        records: Some(records.clone()),
        max_samples: None,
    };
    cmd_bench(&cfg, &o).unwrap();
    let report = cmd_report(&manifest, &records).unwrap();
    let acc = |m| report.method(m).and_then(|r| r.row(BackgroundGroup::Noise).average).map_or(0.0, |c| c.accuracy);
    let (v, s) = (acc(Method::Vanilla), acc(Method::Smsp));
    check(s - v >= 0.20, format!("noise accuracy vanilla {:.1}% vs smsp {:.1}%", v * 100.0, s * 100.0))
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("fft matches direct DFT", Box::new(fft_oracle)),
        ("Parseval energy identity", Box::new(parseval)),
        ("geometric schedule midpoint", Box::new(schedule_fixture)),
        ("perception transform chain", Box::new(perception_chain)),
        ("illusions carry more mid+high energy", Box::new(|| spectral_diagnosis(tmp.path()))),
        ("multi-scale tuple contract", Box::new(tuple_contract)),
        ("evaluator decision table", Box::new(evaluator_fixture)),
        ("cost model linearity", Box::new(cost_linearity)),
        ("generation determinism", Box::new(|| determinism(tmp.path()))),
        ("live directional check", Box::new(|| live_check(tmp.path()))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("[{tag}] {:>2}. {name}: {detail} ({secs:.1}s)", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
