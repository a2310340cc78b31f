//! Procedural noise backgrounds.
//!
//! Every texture is a pure function of `(params, dims, seed)`. The random
//! streams consumed by a texture do not depend on its parameters, so the
//! character-region and background-region variants of one illusion share
//! their phase (dot positions, noise field, symbol choices) and differ only
//! through the parameter that distinguishes them.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::GenError;
use crate::imaging::{FloatPlane, Font};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextureKind {
    /// Vertical black/white gratings.
    Vg,
    /// Gaussian noise around a base gray.
    Gn,
    /// Halftone dots on a jittered grid.
    Hd,
    /// Thresholded smoothed noise.
    Ln,
    /// Micro-text symbols.
    Mn,
}

impl TextureKind {
    pub const ALL: [TextureKind; 5] = [
        TextureKind::Vg,
        TextureKind::Gn,
        TextureKind::Hd,
        TextureKind::Ln,
        TextureKind::Mn,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TextureKind::Vg => "vg",
            TextureKind::Gn => "gn",
            TextureKind::Hd => "hd",
            TextureKind::Ln => "ln",
            TextureKind::Mn => "mn",
        }
    }
}

impl fmt::Display for TextureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TextureKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TextureKind::ALL
            .into_iter()
            .find(|k| k.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown texture kind {s:?}"))
    }
}

/// Kind-specific texture knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TextureParams {
    Vg {
        stripe_width: usize,
    },
    Gn {
        base_gray: f64,
        sigma: f64,
    },
    Hd {
        dot_radius: f64,
        cell: usize,
    },
    Ln {
        smoothing_radius: usize,
    },
    Mn {
        symbols: Vec<char>,
        glyph_px: u32,
        cell: usize,
    },
}

impl TextureParams {
    pub fn kind(&self) -> TextureKind {
        match self {
            TextureParams::Vg { .. } => TextureKind::Vg,
            TextureParams::Gn { .. } => TextureKind::Gn,
            TextureParams::Hd { .. } => TextureKind::Hd,
            TextureParams::Ln { .. } => TextureKind::Ln,
            TextureParams::Mn { .. } => TextureKind::Mn,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |msg: String| Err(GenError::InvalidParams(msg));
        match self {
            TextureParams::Vg { stripe_width } if *stripe_width == 0 => bad("stripe_width must be ≥ 1".into()),
            TextureParams::Gn { base_gray, sigma }
                if !(0.0..=255.0).contains(base_gray) || sigma.is_nan() || *sigma < 0.0 =>
            {
                bad(format!("base_gray {base_gray} must be in [0,255] and sigma {sigma} ≥ 0"))
            }
            TextureParams::Hd { dot_radius, cell } if dot_radius.is_nan() || *dot_radius <= 0.0 || *cell < 2 => {
                bad(format!("dot_radius {dot_radius} must be > 0 and cell {cell} ≥ 2"))
            }
            TextureParams::Ln { smoothing_radius } if *smoothing_radius == 0 => {
                bad("smoothing_radius must be ≥ 1".into())
            }
            TextureParams::Mn { symbols, glyph_px, cell } => {
                if symbols.is_empty() || *glyph_px < 4 || *cell == 0 {
                    return bad("micro-text needs symbols, glyph_px ≥ 4 and cell ≥ 1".into());
                }
                let font = Font::builtin();
                match symbols.iter().find(|&&c| c.is_whitespace() || !font.covers(c)) {
                    Some(c) => bad(format!("symbol {c:?} cannot be drawn")),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }
}

/// Character-region and background-region parameters of one texture kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TexturePair {
    pub char_region: TextureParams,
    pub background: TextureParams,
}

impl TexturePair {
    pub fn kind(&self) -> TextureKind {
        self.background.kind()
    }

    pub fn defaults(kind: TextureKind) -> TexturePair {
        let (char_region, background) = match kind {
            TextureKind::Vg => (
                TextureParams::Vg { stripe_width: 12 },
                TextureParams::Vg { stripe_width: 8 },
            ),
            TextureKind::Gn => (
                TextureParams::Gn {
                    base_gray: 140.0,
                    sigma: 30.0,
                },
                TextureParams::Gn {
                    base_gray: 120.0,
                    sigma: 30.0,
                },
            ),
            TextureKind::Hd => (
                TextureParams::Hd {
                    dot_radius: 5.0,
                    cell: 12,
                },
                TextureParams::Hd {
                    dot_radius: 3.0,
                    cell: 12,
                },
            ),
            TextureKind::Ln => (
                TextureParams::Ln { smoothing_radius: 7 },
                TextureParams::Ln { smoothing_radius: 4 },
            ),
            TextureKind::Mn => (
                TextureParams::Mn {
                    symbols: vec!['@', '&'],
                    glyph_px: 12,
                    cell: 12,
                },
                TextureParams::Mn {
                    symbols: vec!['$', '%', '#'],
                    glyph_px: 12,
                    cell: 12,
                },
            ),
        };
        TexturePair {
            char_region,
            background,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        self.char_region.validate()?;
        self.background.validate()?;
        if self.char_region.kind() != self.background.kind() {
            return Err(GenError::KindMismatch);
        }
        if self.char_region == self.background {
            return Err(GenError::IdenticalParams);
        }
        Ok(())
    }
}

/// Seeds independent random streams for each purpose of a texture.
fn stream(seed: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose);
    rng
}

/// Renders a texture plane of `(H, W)`; values are in `[0, 255]`.
pub fn generate_texture(params: &TextureParams, dims: (usize, usize), seed: u64) -> Result<FloatPlane, GenError> {
    params.validate()?;
    let (h, w) = dims;
    let plane = match params {
        TextureParams::Vg { stripe_width } => {
            FloatPlane::from_fn(w, h, |x, _| if (x / stripe_width) % 2 == 0 { 0.0 } else { 255.0 })?
        }
        TextureParams::Gn { base_gray, sigma } => {
            let mut rng = stream(seed, 1);
            FloatPlane::from_fn(w, h, |_, _| {
                let z: f64 = rng.sample(StandardNormal);
                (base_gray + sigma * z).clamp(0.0, 255.0)
            })?
        }
        TextureParams::Hd { dot_radius, cell } => halftone(h, w, *dot_radius, *cell, seed)?,
        TextureParams::Ln { smoothing_radius } => labyrinth(h, w, *smoothing_radius, seed)?,
        TextureParams::Mn { symbols, glyph_px, cell } => micro_text(h, w, symbols, *glyph_px, *cell, seed)?,
    };
    Ok(plane)
}

fn halftone(h: usize, w: usize, radius: f64, cell: usize, seed: u64) -> Result<FloatPlane, GenError> {
    let mut rng = stream(seed, 2);
    let jitter = cell as f64 / 4.0;
    let mut plane = FloatPlane::filled(w, h, 255.0)?;
    let (nx, ny) = (w.div_ceil(cell) + 1, h.div_ceil(cell) + 1);
    for gy in 0..ny {
        for gx in 0..nx {
            let cx = (gx * cell) as f64 + cell as f64 / 2.0 + rng.random_range(-jitter..=jitter);
            let cy = (gy * cell) as f64 + cell as f64 / 2.0 + rng.random_range(-jitter..=jitter);
            let x0 = (cx - radius).floor().max(0.0) as usize;
            let y0 = (cy - radius).floor().max(0.0) as usize;
            let x1 = ((cx + radius).ceil() as usize).min(w.saturating_sub(1));
            let y1 = ((cy + radius).ceil() as usize).min(h.saturating_sub(1));
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
                    if dx * dx + dy * dy <= radius * radius {
                        plane.set(x, y, 0.0);
                    }
                }
            }
        }
    }
    Ok(plane)
}

fn labyrinth(h: usize, w: usize, radius: usize, seed: u64) -> Result<FloatPlane, GenError> {
    let mut rng = stream(seed, 3);
    let mut field: Vec<f64> = (0..h * w).map(|_| rng.random::<f64>()).collect();
    // Three box passes approximate a Gaussian of comparable width.
    for _ in 0..3 {
        field = box_blur(&field, h, w, radius);
    }
    let values = field.into_iter().map(|v| if v < 0.5 { 0.0 } else { 255.0 }).collect();
    Ok(FloatPlane::new(w, h, values)?)
}

fn box_blur(src: &[f64], h: usize, w: usize, r: usize) -> Vec<f64> {
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;
    let norm = (2 * r + 1) as f64;
    let mut tmp = vec![0.0; h * w];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        let mut acc: f64 = (-(r as isize)..=r as isize).map(|k| row[clamp(k, w)]).sum();
        for x in 0..w {
            tmp[y * w + x] = acc / norm;
            acc += row[clamp(x as isize + r as isize + 1, w)] - row[clamp(x as isize - r as isize, w)];
        }
    }
    let mut out = vec![0.0; h * w];
    for x in 0..w {
        let at = |y: isize| tmp[clamp(y, h) * w + x];
        let mut acc: f64 = (-(r as isize)..=r as isize).map(at).sum();
        for y in 0..h {
            out[y * w + x] = acc / norm;
            acc += at(y as isize + r as isize + 1) - at(y as isize - r as isize);
        }
    }
    out
}

/// One stamped micro-text symbol: cell-local center and chosen glyph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolPlacement {
    pub cx: f64,
    pub cy: f64,
    pub symbol: char,
}

/// Symbol positions and choices for a micro-text texture. Choices are drawn
/// as uniform integers reduced modulo the set size, so the same seed yields
/// the same positions for every symbol set.
pub fn micro_text_layout(
    dims: (usize, usize),
    symbols: &[char],
    cell: usize,
    seed: u64,
) -> Vec<SymbolPlacement> {
    let (h, w) = dims;
    let mut rng = stream(seed, 4);
    let jitter = cell as f64 / 6.0;
    let mut out = Vec::new();
    for gy in 0..h.div_ceil(cell) {
        for gx in 0..w.div_ceil(cell) {
            let pick = rng.random::<u32>() as usize % symbols.len();
            let jx = rng.random_range(-jitter..=jitter);
            let jy = rng.random_range(-jitter..=jitter);
            out.push(SymbolPlacement {
                cx: (gx * cell) as f64 + cell as f64 / 2.0 + jx,
                cy: (gy * cell) as f64 + cell as f64 / 2.0 + jy,
                symbol: symbols[pick],
            });
        }
    }
    out
}

fn micro_text(h: usize, w: usize, symbols: &[char], glyph_px: u32, cell: usize, seed: u64) -> Result<FloatPlane, GenError> {
    let mut plane = FloatPlane::filled(w, h, 255.0)?;
    for p in micro_text_layout((h, w), symbols, cell, seed) {
        let bmp = crate::imaging::text::builtin_symbol(p.symbol, glyph_px)?;
        let Some((x0, y0, x1, y1)) = bmp.ink else { continue };
        // Center the symbol's ink box on the placement point.
        let ox = (p.cx - (x1 - x0 + 1) as f64 / 2.0).round() as isize - x0 as isize;
        let oy = (p.cy - (y1 - y0 + 1) as f64 / 2.0).round() as isize - y0 as isize;
        for by in 0..bmp.height {
            let y = oy + by as isize;
            if y < 0 || y >= h as isize {
                continue;
            }
            for bx in 0..bmp.width {
                let x = ox + bx as isize;
                if x < 0 || x >= w as isize {
                    continue;
                }
                let v = f64::from(bmp.value(bx, by));
                let (xu, yu) = (x as usize, y as usize);
                if v < plane.get(xu, yu) {
                    plane.set(xu, yu, v);
                }
            }
        }
    }
    Ok(plane)
}
