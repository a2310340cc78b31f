use std::collections::HashSet;
use std::fs;

use illuscope_core::illugen::{
    build_dataset, compose_illusion, generate_texture, import_semantic, micro_text_layout, read_manifest,
    validate_manifest, Background, CharsetSpec, DatasetSpec, GenError, HiddenType, Mask, ScaleClass, TextureKind,
    TextureParams, TexturePair,
};
use illuscope_core::imaging::{load_image, save_png, to_gray};
use illuscope_core::spectral::{band_report, energy_curve, fft2d_centered};
use illuscope_core::{Channels, RasterImage};
use sha2::{Digest, Sha256};

fn digits_spec(backgrounds: Vec<TextureKind>, scales: Vec<ScaleClass>, canvas: usize) -> DatasetSpec {
    DatasetSpec {
        charsets: vec![CharsetSpec::builtin("digits")],
        backgrounds,
        scales,
        canvas: (canvas, canvas),
        ..DatasetSpec::default()
    }
}

fn tree_digest(dir: &std::path::Path) -> String {
    let mut files: Vec<_> = walk(dir);
    files.sort();
    let mut h = Sha256::new();
    for f in files {
        h.update(f.strip_prefix(dir).unwrap().to_string_lossy().as_bytes());
        h.update(fs::read(&f).unwrap());
    }
    format!("{:x}", h.finalize())
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn digits_vg_large_cardinality() {
    let dir = tempfile::tempdir().unwrap();
    let spec = digits_spec(vec![TextureKind::Vg], vec![ScaleClass::Large], 1000);
    let out = build_dataset(&spec, dir.path(), 1).unwrap();
    assert_eq!(out.records.len(), 20);
    assert!(out.rejected.is_empty());
    let manifest = read_manifest(&out.manifest_path).unwrap();
    assert_eq!(manifest, out.records);
    validate_manifest(&manifest, dir.path()).unwrap();
    assert_eq!(manifest.iter().filter(|r| r.background == Background::Origin).count(), 10);
    assert_eq!(fs::read_dir(dir.path().join("images")).unwrap().count(), 20);
    assert_eq!(out.counts.get("digit/Large", "VG"), Some(10));
    assert_eq!(out.counts.get("digit/Large", "Origin"), Some(10));
}

#[test]
fn same_seed_same_bytes() {
    let spec = digits_spec(TextureKind::ALL.to_vec(), vec![ScaleClass::Medium], 200);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    build_dataset(&spec, a.path(), 77).unwrap();
    build_dataset(&spec, b.path(), 77).unwrap();
    assert_eq!(tree_digest(a.path()), tree_digest(b.path()));
    let c = tempfile::tempdir().unwrap();
    build_dataset(&spec, c.path(), 78).unwrap();
    assert_ne!(tree_digest(a.path()), tree_digest(c.path()));
}

#[test]
fn full_noise_grid_has_table_columns() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = digits_spec(TextureKind::ALL.to_vec(), vec![ScaleClass::Large], 256);
    spec.charsets[0].limit = Some(2);
    let out = build_dataset(&spec, dir.path(), 3).unwrap();
    assert_eq!(out.counts.columns.len(), 9);
    let (_, row) = &out.counts.rows[0];
    // Origin, three semantic themes, five noise kinds.
    assert_eq!(row, &vec![2, 0, 0, 0, 2, 2, 2, 2, 2]);
}

#[test]
fn failure_removes_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let spec = DatasetSpec {
        charsets: vec![CharsetSpec::inline(
            HiddenType::Word,
            vec!["1".into(), "a rather long sentence that cannot be small".into()],
        )],
        backgrounds: vec![TextureKind::Vg],
        scales: vec![ScaleClass::Small],
        canvas: (200, 200),
        ..DatasetSpec::default()
    };
    assert!(build_dataset(&spec, dir.path(), 0).is_err());
    assert!(!dir.path().join("manifest.jsonl").exists());
    assert!(!dir.path().join("images").exists());
}

#[test]
fn uncovered_characters_rejected_up_front() {
    let dir = tempfile::tempdir().unwrap();
    let spec = DatasetSpec {
        charsets: vec![CharsetSpec::builtin("chinese")],
        ..digits_spec(vec![TextureKind::Vg], vec![ScaleClass::Large], 100)
    };
    let err = build_dataset(&spec, dir.path(), 0).unwrap_err();
    assert!(matches!(err, GenError::Image(_)), "{err}");
    assert!(!dir.path().join("images").exists());
}

#[test]
fn zero_mask_is_pure_background() {
    for kind in TextureKind::ALL {
        let pair = TexturePair::defaults(kind);
        let mask = Mask::new(48, 40, vec![false; 48 * 40]).unwrap();
        let out = compose_illusion(&mask, kind, &pair.char_region, &pair.background, (40, 48), 9).unwrap();
        let pure = RasterImage::from_plane(&generate_texture(&pair.background, (40, 48), 9).unwrap());
        assert_eq!(out, pure, "{kind}");
    }
}

#[test]
fn micro_text_symbol_sets() {
    let pair = TexturePair::defaults(TextureKind::Mn);
    let syms = |p: &TextureParams| match p {
        TextureParams::Mn { symbols, cell, .. } => micro_text_layout((120, 120), symbols, *cell, 5)
            .into_iter()
            .map(|s| s.symbol)
            .collect::<HashSet<char>>(),
        _ => unreachable!(),
    };
    assert!(syms(&pair.char_region).is_subset(&HashSet::from(['@', '&'])));
    assert!(syms(&pair.background).is_subset(&HashSet::from(['$', '%', '#'])));
}

#[test]
fn illusions_carry_more_mid_high_energy() {
    let dir = tempfile::tempdir().unwrap();
    let spec = digits_spec(TextureKind::ALL.to_vec(), vec![ScaleClass::Large], 256);
    let out = build_dataset(&spec, dir.path(), 11).unwrap();
    let share = |path: &str| {
        let img = load_image(&dir.path().join(path)).unwrap();
        let plane = to_gray(&img);
        band_report(&energy_curve(&fft2d_centered(&plane)), plane.dims()).mid_high_share()
    };
    let mut pairs = 0;
    let mut wins = 0;
    for r in out.records.iter().filter(|r| r.background != Background::Origin) {
        let origin = out
            .records
            .iter()
            .find(|o| o.background == Background::Origin && o.base_id() == r.base_id())
            .unwrap();
        pairs += 1;
        if share(&r.image_path) > share(&origin.image_path) {
            wins += 1;
        }
    }
    assert_eq!(pairs, 50);
    assert!(wins as f64 >= 0.95 * pairs as f64, "{wins}/{pairs}");
}

#[test]
fn import_semantic_entries() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("semantic");
    fs::create_dir_all(&images).unwrap();
    let img = RasterImage::filled(64, 48, Channels::Rgb, 200).unwrap();
    let mut truths = String::new();
    for i in 0..5 {
        save_png(&img, &images.join(format!("s{i}.png"))).unwrap();
        truths.push_str(&format!(
            "{{\"file\":\"s{i}.png\",\"truth\":\"{i}\",\"hidden_type\":\"digit\",\"theme\":\"tc\",\"bbox\":[40,20]}}\n"
        ));
    }
    let truths_path = dir.path().join("truths.jsonl");
    fs::write(&truths_path, &truths).unwrap();
    let recs = import_semantic(&images, &truths_path, dir.path()).unwrap();
    assert_eq!(recs.len(), 5);
    validate_manifest(&recs, dir.path()).unwrap();
    assert!(recs.iter().all(|r| r.background == Background::SemanticImport));
    assert_eq!(recs[0].image_path, "semantic/s0.png");
    // 40 of min side 48 is Large.
    assert_eq!(recs[0].scale, ScaleClass::Large);
    assert_eq!(recs[0].gen_params["theme"], "tc");
    // The original file is untouched.
    assert_eq!(load_image(&images.join("s0.png")).unwrap(), img);

    save_png(&img, &images.join("orphan.png")).unwrap();
    match import_semantic(&images, &truths_path, dir.path()) {
        Err(GenError::MissingTruth(f)) => assert_eq!(f, "orphan.png"),
        other => panic!("{other:?}"),
    }
    fs::remove_file(images.join("orphan.png")).unwrap();
    fs::write(images.join("s9.png"), b"not a png").unwrap();
    fs::write(&truths_path, truths + "{\"file\":\"s9.png\",\"truth\":\"9\"}\n").unwrap();
    assert!(matches!(
        import_semantic(&images, &truths_path, dir.path()),
        Err(GenError::UnreadableImage { .. })
    ));
}
