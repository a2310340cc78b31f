//! Frequency-domain engine.
//!
//! Forward transforms are unnormalized and the inverse carries `1/(H·W)`, so
//! `Σ|F|² = H·W·Σ I²`. Spectra are stored DC-centered: the zero frequency
//! sits at row `⌊H/2⌋`, column `⌊W/2⌋`, and every radius in this module is
//! measured from that point.

mod bands;
mod fft;

pub use bands::{band_report, image_band_report, BandReport, BandThresholds};
pub use fft::{fft2d_centered, ifft2d_magnitude};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("low-pass cutoff fraction must lie in (0, 1), got {0}")]
    InvalidLambda(f64),
}

/// DC-centered complex spectrum, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    width: usize,
    height: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn from_parts(width: usize, height: usize, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), width * height);
        Self {
            width,
            height,
            coeffs,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at centered row `u`, column `v` (both in storage coordinates).
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.coeffs[row * self.width + col]
    }

    pub fn center(&self) -> (usize, usize) {
        (self.height / 2, self.width / 2)
    }

    /// Distance of a storage position from the DC term.
    pub fn radius_at(&self, row: usize, col: usize) -> f64 {
        let du = row as f64 - (self.height / 2) as f64;
        let dv = col as f64 - (self.width / 2) as f64;
        (du * du + dv * dv).sqrt()
    }

    /// `ceil(√((H/2)² + (W/2)²))`.
    pub fn r_max(&self) -> usize {
        let h = self.height as f64 / 2.0;
        let w = self.width as f64 / 2.0;
        (h * h + w * w).sqrt().ceil() as usize
    }

    pub fn total_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Spectral energy per unit-width annulus about the DC term.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCurve {
    energies: Vec<f64>,
}

impl EnergyCurve {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn r_max(&self) -> usize {
        self.energies.len() - 1
    }

    pub fn total(&self) -> f64 {
        self.energies.iter().sum()
    }

    /// Writes `r,energy` rows with a header.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "energy"])?;
        for (r, e) in self.energies.iter().enumerate() {
            w.write_record([r.to_string(), format!("{e:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `E(r) = Σ |F(u,v)|²` over `√(u²+v²) ∈ [r, r+1)`.
pub fn energy_curve(spec: &Spectrum) -> EnergyCurve {
    let mut energies = vec![0.0; spec.r_max() + 1];
    for row in 0..spec.height {
        for col in 0..spec.width {
            let r = spec.radius_at(row, col).floor() as usize;
            energies[r] += spec.get(row, col).norm_sqr();
        }
    }
    EnergyCurve { energies }
}

/// Ideal low-pass: keeps coefficients with center distance `≤ min(H,W)·λ`.
pub fn low_pass(spec: &Spectrum, lambda: f64) -> Result<Spectrum, SpectralError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(SpectralError::InvalidLambda(lambda));
    }
    let cutoff = spec.height.min(spec.width) as f64 * lambda;
    let mut out = spec.clone();
    for row in 0..spec.height {
        for col in 0..spec.width {
            if spec.radius_at(row, col) > cutoff {
                out.coeffs[row * spec.width + col] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(out)
}
