//! Pixel-buffer foundation shared by every other module.
//!
//! Two representations are used throughout: [`RasterImage`] holds 8-bit
//! samples as they are stored on disk or sent over the wire, and
//! [`FloatPlane`] holds a single channel of `f64` samples in the nominal
//! `[0, 255]` range for numerical work.

mod io;
mod resample;
pub(crate) mod text;

pub use io::{decode_png, encode_png, load_image, save_png};
pub use resample::{pad_center_white, resize, BoxResampler, Resampler};
pub use text::{render_characters, Font, GlyphLayout};

use thiserror::Error;

/// Rec. 601 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("sample buffer has {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("content {content_w}x{content_h} is larger than canvas {canvas_w}x{canvas_h}")]
    ContentLargerThanCanvas {
        content_w: usize,
        content_h: usize,
        canvas_w: usize,
        canvas_h: usize,
    },
    #[error("font has no glyph for {0:?}")]
    MissingGlyph(char),
    #[error("text must contain at least one visible character")]
    EmptyText,
    #[error("text {text:?} cannot be rendered at scale {scale} on a {width}x{height} canvas")]
    UnreachableScale {
        text: String,
        scale: String,
        width: usize,
        height: usize,
    },
    #[error("invalid font data: {0}")]
    InvalidFont(String),
    #[error("unsupported channel count {0}")]
    UnsupportedChannels(usize),
    #[error("channel planes disagree in size")]
    PlaneMismatch,
    #[error("image codec error: {0}")]
    Codec(#[from] image::ImageError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channels {
    Gray,
    Rgb,
}

impl Channels {
    pub fn count(self) -> usize {
        match self {
            Channels::Gray => 1,
            Channels::Rgb => 3,
        }
    }

    pub fn from_count(n: usize) -> Result<Self, ImageError> {
        match n {
            1 => Ok(Channels::Gray),
            3 => Ok(Channels::Rgb),
            other => Err(ImageError::UnsupportedChannels(other)),
        }
    }
}

/// Row-major 8-bit image with interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: Channels,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(
        width: usize,
        height: usize,
        channels: Channels,
        data: Vec<u8>,
    ) -> Result<Self, ImageError> {
        check_dims(width, height)?;
        let expected = width * height * channels.count();
        if data.len() != expected {
            return Err(ImageError::BufferSize {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(
        width: usize,
        height: usize,
        channels: Channels,
        value: u8,
    ) -> Result<Self, ImageError> {
        Self::new(
            width,
            height,
            channels,
            vec![value; width * height * channels.count()],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(height, width)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn channels(&self) -> Channels {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    /// Sample at `(x, y)` in channel `c`.
    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels.count() + c]
    }

    /// Quantizes a plane into a gray image: clamp to `[0, 255]`, round half away from zero.
    pub fn from_plane(plane: &FloatPlane) -> Self {
        Self {
            width: plane.width,
            height: plane.height,
            channels: Channels::Gray,
            data: plane.values.iter().map(|&v| quantize(v)).collect(),
        }
    }

    /// Recombines one plane per channel (1 or 3 planes).
    pub fn from_planes(planes: &[FloatPlane]) -> Result<Self, ImageError> {
        let channels = Channels::from_count(planes.len())?;
        let first = &planes[0];
        if planes
            .iter()
            .any(|p| p.width != first.width || p.height != first.height)
        {
            return Err(ImageError::PlaneMismatch);
        }
        let n = first.values.len();
        let mut data = Vec::with_capacity(n * planes.len());
        for i in 0..n {
            for p in planes {
                data.push(quantize(p.values[i]));
            }
        }
        Self::new(first.width, first.height, channels, data)
    }

    /// Splits the image into one float plane per channel.
    pub fn planes(&self) -> Vec<FloatPlane> {
        let nc = self.channels.count();
        (0..nc)
            .map(|c| FloatPlane {
                width: self.width,
                height: self.height,
                values: self
                    .data
                    .iter()
                    .skip(c)
                    .step_by(nc)
                    .map(|&v| f64::from(v))
                    .collect(),
            })
            .collect()
    }
}

pub(crate) fn quantize(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round() as u8
}

fn check_dims(width: usize, height: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 {
        Err(ImageError::ZeroDimension { width, height })
    } else {
        Ok(())
    }
}

/// Single-channel working plane, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPlane {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl FloatPlane {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, ImageError> {
        check_dims(width, height)?;
        if values.len() != width * height {
            return Err(ImageError::BufferSize {
                expected: width * height,
                actual: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, ImageError> {
        check_dims(width, height)?;
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(height, width)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] = v;
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.values[y * self.width..(y + 1) * self.width]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> FloatPlane {
        FloatPlane {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Luminance plane. Gray input passes through unchanged; RGB uses Rec. 601 weights.
pub fn to_gray(img: &RasterImage) -> FloatPlane {
    let values = match img.channels {
        Channels::Gray => img.data.iter().map(|&v| f64::from(v)).collect(),
        Channels::Rgb => img
            .data
            .chunks_exact(3)
            .map(|px| {
                LUMA_WEIGHTS[0] * f64::from(px[0])
                    + LUMA_WEIGHTS[1] * f64::from(px[1])
                    + LUMA_WEIGHTS[2] * f64::from(px[2])
            })
            .collect(),
    };
    FloatPlane {
        width: img.width,
        height: img.height,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_passes_through() {
        let img = RasterImage::filled(4, 3, Channels::Gray, 128).unwrap();
        let plane = to_gray(&img);
        assert!(plane.values().iter().all(|&v| v == 128.0));
    }

    #[test]
    fn rgb_luma() {
        let white = RasterImage::new(1, 1, Channels::Rgb, vec![255, 255, 255]).unwrap();
        assert!((to_gray(&white).get(0, 0) - 255.0).abs() < 1e-9);
        let red = RasterImage::new(1, 1, Channels::Rgb, vec![255, 0, 0]).unwrap();
        assert!((to_gray(&red).get(0, 0) - 76.245).abs() < 1e-9);
    }

    #[test]
    fn buffer_length_checked() {
        assert!(matches!(
            RasterImage::new(2, 2, Channels::Rgb, vec![0; 4]),
            Err(ImageError::BufferSize { expected: 12, .. })
        ));
        assert!(matches!(
            FloatPlane::new(0, 3, vec![]),
            Err(ImageError::ZeroDimension { .. })
        ));
    }

    #[test]
    fn planes_round_trip() {
        let data: Vec<u8> = (0..24).map(|v| v as u8 * 10).collect();
        let img = RasterImage::new(4, 2, Channels::Rgb, data).unwrap();
        let back = RasterImage::from_planes(&img.planes()).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn quantize_clamps() {
        assert_eq!(quantize(-3.0), 0);
        assert_eq!(quantize(255.7), 255);
        assert_eq!(quantize(127.5), 128);
    }
}
