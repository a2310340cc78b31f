//! The two classical preprocessing baselines: repeated Gaussian blur followed
//! by unsharp masking, and Gaussian blur followed by luminance histogram
//! equalization.

use serde::{Deserialize, Serialize};

use crate::imaging::{quantize, Channels, FloatPlane, RasterImage, LUMA_WEIGHTS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilteredConfig {
    pub blur_sigma: f64,
    pub blur_passes: usize,
    pub sharpen_amount: f64,
    pub sharpen_sigma: f64,
}

impl Default for FilteredConfig {
    fn default() -> Self {
        Self {
            blur_sigma: 2.0,
            blur_passes: 3,
            sharpen_amount: 1.0,
            sharpen_sigma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlurHistogramConfig {
    pub blur_sigma: f64,
}

impl Default for BlurHistogramConfig {
    fn default() -> Self {
        Self { blur_sigma: 2.0 }
    }
}

/// Normalized 1-D Gaussian taps with radius `ceil(3σ)`. `σ ≤ 0` gives the identity tap.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Separable Gaussian blur with clamp-to-edge borders.
pub fn gaussian_blur(plane: &FloatPlane, sigma: f64) -> FloatPlane {
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as i64;
    let (h, w) = plane.dims();
    let clamp = |i: i64, n: usize| i.clamp(0, n as i64 - 1) as usize;

    let mut tmp = vec![0.0; h * w];
    for y in 0..h {
        let row = plane.row(y);
        for x in 0..w {
            tmp[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, &wt)| wt * row[clamp(x as i64 + k as i64 - radius, w)])
                .sum();
        }
    }
    FloatPlane::from_fn(w, h, |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(k, &wt)| wt * tmp[clamp(y as i64 + k as i64 - radius, h) * w + x])
            .sum()
    })
    .expect("dims preserved")
}

/// Blur `passes` times, then `out = b + amount·(b − blur(b, σ_sharpen))`, per channel.
pub fn baseline_filtered(img: &RasterImage, cfg: &FilteredConfig) -> RasterImage {
    let planes: Vec<FloatPlane> = img
        .planes()
        .iter()
        .map(|p| {
            let mut b = p.clone();
            for _ in 0..cfg.blur_passes {
                b = gaussian_blur(&b, cfg.blur_sigma);
            }
            let smooth = gaussian_blur(&b, cfg.sharpen_sigma);
            let vals = b
                .values()
                .iter()
                .zip(smooth.values())
                .map(|(&v, &s)| v + cfg.sharpen_amount * (v - s))
                .collect();
            FloatPlane::new(b.width(), b.height(), vals).expect("dims preserved")
        })
        .collect();
    RasterImage::from_planes(&planes).expect("channel count preserved")
}

/// Global equalization: `v ↦ ⌊255·cdf(v)⌋`.
pub fn equalize_histogram(values: &[u8]) -> Vec<u8> {
    let mut hist = [0u64; 256];
    for &v in values {
        hist[v as usize] += 1;
    }
    let n = values.len() as u64;
    let mut lut = [0u8; 256];
    let mut cum = 0u64;
    for (v, &count) in hist.iter().enumerate() {
        cum += count;
        lut[v] = (255 * cum).checked_div(n).unwrap_or(0) as u8;
    }
    values.iter().map(|&v| lut[v as usize]).collect()
}

/// Gaussian blur, then histogram equalization of luminance only.
pub fn baseline_blur_histogram(img: &RasterImage, cfg: &BlurHistogramConfig) -> RasterImage {
    let blurred_planes: Vec<FloatPlane> = img
        .planes()
        .iter()
        .map(|p| gaussian_blur(p, cfg.blur_sigma))
        .collect();
    let blurred = RasterImage::from_planes(&blurred_planes).expect("channel count preserved");
    match blurred.channels() {
        Channels::Gray => {
            let eq = equalize_histogram(blurred.data());
            RasterImage::new(blurred.width(), blurred.height(), Channels::Gray, eq).expect("same size")
        }
        Channels::Rgb => {
            let ycc: Vec<[f64; 3]> = blurred
                .data()
                .chunks_exact(3)
                .map(|px| rgb_to_ycbcr([px[0], px[1], px[2]]))
                .collect();
            let luma: Vec<u8> = ycc.iter().map(|p| quantize(p[0])).collect();
            let eq = equalize_histogram(&luma);
            let data = ycc
                .iter()
                .zip(eq)
                .flat_map(|(p, y)| ycbcr_to_rgb([f64::from(y), p[1], p[2]]))
                .collect();
            RasterImage::new(blurred.width(), blurred.height(), Channels::Rgb, data).expect("same size")
        }
    }
}

// Full-range BT.601, consistent with the luma weights used for grayscale.
fn rgb_to_ycbcr(px: [u8; 3]) -> [f64; 3] {
    let [r, g, b] = px.map(f64::from);
    let y = LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b;
    [y, 128.0 + (b - y) * 0.564, 128.0 + (r - y) * 0.713]
}

fn ycbcr_to_rgb(p: [f64; 3]) -> [u8; 3] {
    let [y, cb, cr] = p;
    let r = y + (cr - 128.0) / 0.713;
    let b = y + (cb - 128.0) / 0.564;
    let g = (y - LUMA_WEIGHTS[0] * r - LUMA_WEIGHTS[2] * b) / LUMA_WEIGHTS[1];
    [quantize(r), quantize(g), quantize(b)]
}
