use serde::{Deserialize, Serialize};

use super::{energy_curve, fft2d_centered, EnergyCurve};
use crate::imaging::{to_gray, RasterImage};

/// Side length at which the band radii are defined.
pub const REFERENCE_RESOLUTION: f64 = 1000.0;

/// Annulus radii delimiting the low, mid and high bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandThresholds {
    /// Low band: `r ≤ low_max`.
    pub low_max: usize,
    /// Mid band: `mid_min ≤ r ≤ mid_max`.
    pub mid_min: usize,
    pub mid_max: usize,
    /// High band: `r ≥ high_min`.
    pub high_min: usize,
}

impl BandThresholds {
    /// 100 / 300–400 / 500 at 1000×1000, scaled by `min(H,W)/1000` and floored.
    pub fn for_resolution(height: usize, width: usize) -> Self {
        let f = height.min(width) as f64 / REFERENCE_RESOLUTION;
        let at = |r: f64| (r * f).floor() as usize;
        Self {
            low_max: at(100.0),
            mid_min: at(300.0),
            mid_max: at(400.0),
            high_min: at(500.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub thresholds: BandThresholds,
    pub low: f64,
    pub mid: f64,
    pub high: f64,
    pub total: f64,
    pub low_share: f64,
    pub mid_share: f64,
    pub high_share: f64,
}

impl BandReport {
    pub fn mid_high_share(&self) -> f64 {
        self.mid_share + self.high_share
    }

    pub const CSV_HEADER: [&'static str; 7] =
        ["low", "mid", "high", "total", "low_share", "mid_share", "high_share"];

    pub fn csv_fields(&self) -> [String; 7] {
        [
            format!("{:e}", self.low),
            format!("{:e}", self.mid),
            format!("{:e}", self.high),
            format!("{:e}", self.total),
            format!("{:.6}", self.low_share),
            format!("{:.6}", self.mid_share),
            format!("{:.6}", self.high_share),
        ]
    }
}

/// Aggregates an energy curve into low/mid/high bands for an `(H, W)` image.
pub fn band_report(curve: &EnergyCurve, resolution: (usize, usize)) -> BandReport {
    let t = BandThresholds::for_resolution(resolution.0, resolution.1);
    let e = curve.energies();
    let sum = |lo: usize, hi: usize| -> f64 {
        if lo >= e.len() || lo > hi {
            0.0
        } else {
            e[lo..=hi.min(e.len() - 1)].iter().sum()
        }
    };
    let low = sum(0, t.low_max);
    let mid = sum(t.mid_min, t.mid_max);
    let high = sum(t.high_min, usize::MAX - 1);
    let total = curve.total();
    let share = |x: f64| if total > 0.0 { (x / total).clamp(0.0, 1.0) } else { 0.0 };
    BandReport {
        thresholds: t,
        low,
        mid,
        high,
        total,
        low_share: share(low),
        mid_share: share(mid),
        high_share: share(high),
    }
}

/// Band report of an image's grayscale spectrum.
pub fn image_band_report(img: &RasterImage) -> BandReport {
    let plane = to_gray(img);
    band_report(&energy_curve(&fft2d_centered(&plane)), plane.dims())
}
