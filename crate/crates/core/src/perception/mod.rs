//! Multi-scale perception preprocessing.
//!
//! A single perception transform low-passes an image in the frequency
//! domain, shrinks it by a scale factor and pastes it back onto a white
//! canvas of the original size. A [`SmspSchedule`] holds `K` parameter pairs
//! spaced geometrically between a strong and a weak boundary; applying all of
//! them yields the `K + 1` image tuple fed to a model, original first.

mod baselines;

pub use baselines::{
    baseline_blur_histogram, baseline_filtered, equalize_histogram, gaussian_blur,
    gaussian_kernel, BlurHistogramConfig, FilteredConfig,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imaging::{pad_center_white, resize, FloatPlane, ImageError, RasterImage};
use crate::spectral::{fft2d_centered, ifft2d_magnitude, low_pass, SpectralError};

#[derive(Debug, Error)]
pub enum PerceptionError {
    #[error("filter cutoff must lie in (0, 1), got {0}")]
    InvalidLambda(f64),
    #[error("scale factor must lie in (0, 1), got {0}")]
    InvalidScale(f64),
    #[error("scale {scale} shrinks a {height}x{width} image to zero pixels")]
    ZeroDimension { scale: f64, height: usize, width: usize },
    #[error("a schedule needs at least two variants, got {0}")]
    KTooSmall(usize),
    #[error("strong boundary ({strong_lambda}, {strong_scale}) must be strictly below weak boundary ({weak_lambda}, {weak_scale}) in both parameters")]
    NonMonotoneBoundaries {
        strong_lambda: f64,
        strong_scale: f64,
        weak_lambda: f64,
        weak_scale: f64,
    },
    #[error("variant index {index} out of range 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },
    #[error(transparent)]
    Image(#[from] ImageError),
}

impl From<SpectralError> for PerceptionError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::InvalidLambda(l) => PerceptionError::InvalidLambda(l),
        }
    }
}

/// One `(λ, s)` pair: low-pass cutoff fraction and rescaling factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct PerceptionParams {
    lambda: f64,
    scale: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    lambda: f64,
    scale: f64,
}

impl TryFrom<RawParams> for PerceptionParams {
    type Error = PerceptionError;
    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        PerceptionParams::new(raw.lambda, raw.scale)
    }
}

impl From<PerceptionParams> for RawParams {
    fn from(p: PerceptionParams) -> Self {
        RawParams {
            lambda: p.lambda,
            scale: p.scale,
        }
    }
}

impl PerceptionParams {
    pub fn new(lambda: f64, scale: f64) -> Result<Self, PerceptionError> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(PerceptionError::InvalidLambda(lambda));
        }
        if !(scale > 0.0 && scale < 1.0) {
            return Err(PerceptionError::InvalidScale(scale));
        }
        Ok(Self { lambda, scale })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// Strongest boundary pair: best on the largest hidden characters.
pub const DEFAULT_STRONG: (f64, f64) = (0.012, 0.1);
/// Weakest boundary pair: best on the smallest hidden characters.
pub const DEFAULT_WEAK: (f64, f64) = (0.05, 0.4);
pub const DEFAULT_K: usize = 3;

/// Which stages of the perception transform run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub filter: bool,
    pub rescale: bool,
}

impl Stages {
    pub const ALL: Stages = Stages {
        filter: true,
        rescale: true,
    };
}

/// Size and placement of the downscaled content inside a `(H, W)` canvas:
/// `(top, left, height, width)`.
pub fn content_region(
    dims: (usize, usize),
    params: PerceptionParams,
) -> Result<(usize, usize, usize, usize), PerceptionError> {
    let (h, w) = dims;
    // The epsilon keeps products like 100 * 0.29 from flooring one pixel short.
    let scaled = |n: usize| (n as f64 * params.scale + 1e-9).floor() as usize;
    let (sh, sw) = (scaled(h), scaled(w));
    if sh == 0 || sw == 0 {
        return Err(PerceptionError::ZeroDimension {
            scale: params.scale,
            height: h,
            width: w,
        });
    }
    Ok(((h - sh) / 2, (w - sw) / 2, sh, sw))
}

/// Perception transform on one plane, before quantization.
pub fn perceive_plane(
    plane: &FloatPlane,
    params: PerceptionParams,
    stages: Stages,
) -> Result<FloatPlane, PerceptionError> {
    let filtered = if stages.filter {
        ifft2d_magnitude(&low_pass(&fft2d_centered(plane), params.lambda)?)
    } else {
        plane.clone()
    };
    if !stages.rescale {
        return Ok(filtered);
    }
    let (_, _, sh, sw) = content_region(plane.dims(), params)?;
    let scaled = resize(&filtered, (sh, sw))?;
    Ok(pad_center_white(&scaled, plane.dims())?)
}

/// Applies the perception transform to every channel and quantizes.
pub fn perceive(img: &RasterImage, params: PerceptionParams) -> Result<RasterImage, PerceptionError> {
    perceive_with(img, params, Stages::ALL)
}

pub fn perceive_with(
    img: &RasterImage,
    params: PerceptionParams,
    stages: Stages,
) -> Result<RasterImage, PerceptionError> {
    let planes = img
        .planes()
        .iter()
        .map(|p| perceive_plane(p, params, stages))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RasterImage::from_planes(&planes)?)
}

/// `K` perception pairs ordered from strongest to weakest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmspSchedule {
    k: usize,
    strong: PerceptionParams,
    weak: PerceptionParams,
    derived: Vec<PerceptionParams>,
}

impl SmspSchedule {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn strong(&self) -> PerceptionParams {
        self.strong
    }

    pub fn weak(&self) -> PerceptionParams {
        self.weak
    }

    pub fn derived(&self) -> &[PerceptionParams] {
        &self.derived
    }

    /// `K = 3` between `(0.012, 0.1)` and `(0.05, 0.4)`.
    pub fn default_schedule() -> SmspSchedule {
        let strong = PerceptionParams::new(DEFAULT_STRONG.0, DEFAULT_STRONG.1).expect("valid default");
        let weak = PerceptionParams::new(DEFAULT_WEAK.0, DEFAULT_WEAK.1).expect("valid default");
        build_schedule(DEFAULT_K, strong, weak).expect("valid default")
    }
}

/// Geometric interpolation `xᵢ = x₁·(x_K/x₁)^((i−1)/(K−1))` for both parameters.
pub fn build_schedule(
    k: usize,
    strong: PerceptionParams,
    weak: PerceptionParams,
) -> Result<SmspSchedule, PerceptionError> {
    if k < 2 {
        return Err(PerceptionError::KTooSmall(k));
    }
    if !(strong.lambda < weak.lambda && strong.scale < weak.scale) {
        return Err(PerceptionError::NonMonotoneBoundaries {
            strong_lambda: strong.lambda,
            strong_scale: strong.scale,
            weak_lambda: weak.lambda,
            weak_scale: weak.scale,
        });
    }
    let lambda_ratio = weak.lambda / strong.lambda;
    let scale_ratio = weak.scale / strong.scale;
    let mut derived = Vec::with_capacity(k);
    derived.push(strong);
    for i in 1..k - 1 {
        let t = i as f64 / (k - 1) as f64;
        derived.push(PerceptionParams::new(
            strong.lambda * lambda_ratio.powf(t),
            strong.scale * scale_ratio.powf(t),
        )?);
    }
    derived.push(weak);
    Ok(SmspSchedule {
        k,
        strong,
        weak,
        derived,
    })
}

/// Original image followed by its processed variants.
#[derive(Debug, Clone, PartialEq)]
pub struct SmspInput {
    pub images: Vec<RasterImage>,
}

impl SmspInput {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

/// `(I, P₁(I), …, P_K(I))`.
pub fn build_smsp_input(img: &RasterImage, schedule: &SmspSchedule) -> Result<SmspInput, PerceptionError> {
    assemble(img, schedule.derived(), Stages::ALL)
}

fn assemble(
    img: &RasterImage,
    params: &[PerceptionParams],
    stages: Stages,
) -> Result<SmspInput, PerceptionError> {
    let mut images = Vec::with_capacity(params.len() + 1);
    images.push(img.clone());
    for &p in params {
        images.push(perceive_with(img, p, stages)?);
    }
    Ok(SmspInput { images })
}

/// Component ablations of the multi-scale tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    NoFilter,
    NoRescale,
    /// 1-based variant index; yields `[original, variant_i]`.
    SingleVariant(usize),
}

impl Ablation {
    /// Short tag used in method names and file suffixes.
    pub fn tag(&self) -> String {
        match self {
            Ablation::NoFilter => "no_filter".into(),
            Ablation::NoRescale => "no_rescale".into(),
            Ablation::SingleVariant(i) => format!("single_{i}"),
        }
    }

    pub fn parse_tag(tag: &str) -> Option<Ablation> {
        match tag {
            "no_filter" => Some(Ablation::NoFilter),
            "no_rescale" => Some(Ablation::NoRescale),
            _ => {
                let idx = tag
                    .strip_prefix("single_variant:")
                    .or_else(|| tag.strip_prefix("single_variant_"))
                    .or_else(|| tag.strip_prefix("single_"))?;
                idx.parse().ok().map(Ablation::SingleVariant)
            }
        }
    }
}

pub fn ablate(
    img: &RasterImage,
    mode: Ablation,
    schedule: &SmspSchedule,
) -> Result<SmspInput, PerceptionError> {
    match mode {
        Ablation::NoFilter => assemble(
            img,
            schedule.derived(),
            Stages {
                filter: false,
                rescale: true,
            },
        ),
        Ablation::NoRescale => assemble(
            img,
            schedule.derived(),
            Stages {
                filter: true,
                rescale: false,
            },
        ),
        Ablation::SingleVariant(i) => {
            if i == 0 || i > schedule.k() {
                return Err(PerceptionError::IndexOutOfRange {
                    index: i,
                    k: schedule.k(),
                });
            }
            assemble(img, &schedule.derived()[i - 1..i], Stages::ALL)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Channels;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(l: f64, s: f64) -> PerceptionParams {
        PerceptionParams::new(l, s).unwrap()
    }

    fn random_gray(w: usize, h: usize, seed: u64) -> RasterImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..w * h).map(|_| rng.random::<u8>()).collect();
        RasterImage::new(w, h, Channels::Gray, data).unwrap()
    }

    #[test]
    fn params_validated() {
        assert!(matches!(PerceptionParams::new(0.0, 0.5), Err(PerceptionError::InvalidLambda(_))));
        assert!(matches!(PerceptionParams::new(0.5, 1.0), Err(PerceptionError::InvalidScale(_))));
        let bad: Result<PerceptionParams, _> = serde_json::from_str(r#"{"lambda":1.5,"scale":0.2}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn default_schedule_interior() {
        let s = SmspSchedule::default_schedule();
        assert_eq!(s.k(), 3);
        let mid = s.derived()[1];
        // oracle: 0.012 * sqrt(0.05 / 0.012), evaluated at 30 digits
        assert!((mid.lambda() - 0.024_494_897_427_831_78).abs() < 1e-12);
        assert_eq!(mid.scale(), 0.2);
    }

    #[test]
    fn k2_has_only_boundaries() {
        let s = build_schedule(2, params(0.01, 0.1), params(0.2, 0.5)).unwrap();
        assert_eq!(s.derived(), &[params(0.01, 0.1), params(0.2, 0.5)]);
    }

    #[test]
    fn schedule_errors() {
        assert!(matches!(
            build_schedule(3, params(0.05, 0.1), params(0.05, 0.4)),
            Err(PerceptionError::NonMonotoneBoundaries { .. })
        ));
        assert!(matches!(
            build_schedule(3, params(0.01, 0.4), params(0.05, 0.1)),
            Err(PerceptionError::NonMonotoneBoundaries { .. })
        ));
        assert!(matches!(
            build_schedule(1, params(0.01, 0.1), params(0.05, 0.4)),
            Err(PerceptionError::KTooSmall(1))
        ));
    }

    #[test]
    fn white_stays_white() {
        let img = RasterImage::filled(1000, 1000, Channels::Gray, 255).unwrap();
        let out = perceive(&img, params(0.012, 0.1)).unwrap();
        assert!(out.data().iter().all(|&v| v == 255));
    }

    #[test]
    fn strong_boundary_content_region() {
        assert_eq!(content_region((1000, 1000), params(0.012, 0.1)).unwrap(), (450, 450, 100, 100));
        let img = RasterImage::filled(1000, 1000, Channels::Gray, 0).unwrap();
        let out = perceive(&img, params(0.012, 0.1)).unwrap();
        for y in 0..1000 {
            for x in 0..1000 {
                let inside = (450..550).contains(&x) && (450..550).contains(&y);
                assert_eq!(out.get(x, y, 0) == 0, inside, "({x},{y})");
            }
        }
    }

    #[test]
    fn near_noop_filter_matches_direct_composition() {
        let img = random_gray(16, 16, 5);
        let plane = &img.planes()[0];
        let p = params(0.9, 0.5);
        let got = perceive_plane(plane, p, Stages::ALL).unwrap();
        let oracle = pad_center_white(&resize(plane, (8, 8)).unwrap(), (16, 16)).unwrap();
        for (a, b) in got.values().iter().zip(oracle.values()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn scale_too_small() {
        let img = RasterImage::filled(5, 5, Channels::Gray, 9).unwrap();
        assert!(matches!(
            perceive(&img, params(0.5, 0.1)),
            Err(PerceptionError::ZeroDimension { .. })
        ));
    }

    #[test]
    fn rgb_channels_independent() {
        let gray = random_gray(20, 12, 9);
        let mut data = Vec::new();
        for &v in gray.data() {
            data.extend_from_slice(&[v, 255 - v, 40]);
        }
        let rgb = RasterImage::new(20, 12, Channels::Rgb, data).unwrap();
        let p = params(0.2, 0.5);
        let out = perceive(&rgb, p).unwrap();
        let red_only = perceive(&gray, p).unwrap();
        for i in 0..20 * 12 {
            assert_eq!(out.data()[i * 3], red_only.data()[i]);
            assert_eq!(out.data()[i * 3 + 2].abs_diff(40).min(out.data()[i * 3 + 2].abs_diff(255)), 0);
        }
    }

    #[test]
    fn tuple_shapes() {
        let img = random_gray(100, 100, 1);
        let t = build_smsp_input(&img, &SmspSchedule::default_schedule()).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.images[0], img);

        let k5 = build_schedule(5, params(0.012, 0.1), params(0.05, 0.4)).unwrap();
        let sizes: Vec<usize> = k5
            .derived()
            .iter()
            .map(|&p| content_region((1000, 1000), p).unwrap().2)
            .collect();
        // oracle: floor(1000 * 0.1 * 4^((i-1)/4))
        assert_eq!(sizes, vec![100, 141, 200, 282, 400]);
        let t5 = build_smsp_input(&img, &k5).unwrap();
        assert_eq!(t5.len(), 6);
    }

    #[test]
    fn ablations() {
        let img = random_gray(40, 40, 2);
        let s = SmspSchedule::default_schedule();
        let single = ablate(&img, Ablation::SingleVariant(2), &s).unwrap();
        assert_eq!(single.len(), 2);
        assert_eq!(single.images[1], perceive(&img, s.derived()[1]).unwrap());
        assert!(matches!(
            ablate(&img, Ablation::SingleVariant(4), &s),
            Err(PerceptionError::IndexOutOfRange { index: 4, k: 3 })
        ));
        assert!(ablate(&img, Ablation::SingleVariant(0), &s).is_err());

        let no_filter = ablate(&img, Ablation::NoFilter, &s).unwrap();
        let plane = &img.planes()[0];
        for (variant, &p) in no_filter.images[1..].iter().zip(s.derived()) {
            let (_, _, sh, sw) = content_region((40, 40), p).unwrap();
            let oracle = pad_center_white(&resize(plane, (sh, sw)).unwrap(), (40, 40)).unwrap();
            assert_eq!(variant, &RasterImage::from_plane(&oracle));
        }

        let white = RasterImage::filled(30, 30, Channels::Gray, 255).unwrap();
        let nr = ablate(&white, Ablation::NoRescale, &s).unwrap();
        assert!(nr.images.iter().all(|im| im.data().iter().all(|&v| v == 255)));
    }

    #[test]
    fn both_stages_off_copies_original() {
        let img = random_gray(24, 24, 4);
        let off = Stages {
            filter: false,
            rescale: false,
        };
        let t = assemble(&img, SmspSchedule::default_schedule().derived(), off).unwrap();
        assert!(t.images.iter().all(|im| im == &img));
    }

    #[test]
    fn ablation_tags() {
        assert_eq!(Ablation::parse_tag("single_variant:2"), Some(Ablation::SingleVariant(2)));
        assert_eq!(Ablation::parse_tag("single_3"), Some(Ablation::SingleVariant(3)));
        assert_eq!(Ablation::parse_tag("no_filter"), Some(Ablation::NoFilter));
        assert_eq!(Ablation::parse_tag("bogus"), None);
        assert_eq!(Ablation::SingleVariant(1).tag(), "single_1");
    }

    proptest! {
        #[test]
        fn schedule_is_geometric(k in 2usize..9, l1 in 0.001f64..0.3, l_ratio in 1.01f64..3.0, s1 in 0.01f64..0.3, s_ratio in 1.01f64..3.0) {
            let strong = params(l1, s1);
            let weak = params(l1 * l_ratio, s1 * s_ratio);
            let s = build_schedule(k, strong, weak).unwrap();
            let d = s.derived();
            prop_assert_eq!(d.len(), k);
            prop_assert_eq!(d[0], strong);
            prop_assert_eq!(d[k - 1], weak);
            for w in d.windows(2) {
                prop_assert!(w[0].lambda() < w[1].lambda());
                prop_assert!(w[0].scale() < w[1].scale());
            }
            if k > 2 {
                let q = d[1].lambda() / d[0].lambda();
                let r = d[1].scale() / d[0].scale();
                for w in d.windows(2) {
                    prop_assert!(((w[1].lambda() / w[0].lambda()) / q - 1.0).abs() < 1e-12);
                    prop_assert!(((w[1].scale() / w[0].scale()) / r - 1.0).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn perceive_keeps_dims(w in 10usize..40, h in 10usize..40, seed in 0u64..1000) {
            let img = random_gray(w, h, seed);
            let a = perceive(&img, params(0.1, 0.5)).unwrap();
            let b = perceive(&img, params(0.1, 0.5)).unwrap();
            prop_assert_eq!(a.dims(), img.dims());
            prop_assert_eq!(a, b);
        }
    }
}
