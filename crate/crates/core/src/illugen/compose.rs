use crate::imaging::{to_gray, FloatPlane, RasterImage};

use super::texture::{generate_texture, TextureKind, TextureParams};
use super::GenError;

/// Binary character mask: `true` where the hidden character is drawn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, GenError> {
        if bits.len() != width * height {
            return Err(GenError::MaskMismatch {
                mask: (height, bits.len() / width.max(1)),
                canvas: (height, width),
            });
        }
        Ok(Self { width, height, bits })
    }

    /// Ink pixels of a rendered original: luminance below 128.
    pub fn from_original(img: &RasterImage) -> Self {
        let gray = to_gray(img);
        Self {
            width: img.width(),
            height: img.height(),
            bits: gray.values().iter().map(|&v| v < 128.0).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// An illusion together with its pure background texture.
#[derive(Debug, Clone)]
pub struct Composition {
    pub illusion: RasterImage,
    pub background: RasterImage,
}

/// Fills the mask with the character-region texture and everything else
/// with the background texture. Both textures share `seed`.
pub fn compose_illusion(
    mask: &Mask,
    kind: TextureKind,
    p_c: &TextureParams,
    p_b: &TextureParams,
    canvas: (usize, usize),
    seed: u64,
) -> Result<RasterImage, GenError> {
    compose_with_background(mask, kind, p_c, p_b, canvas, seed).map(|c| c.illusion)
}

pub fn compose_with_background(
    mask: &Mask,
    kind: TextureKind,
    p_c: &TextureParams,
    p_b: &TextureParams,
    canvas: (usize, usize),
    seed: u64,
) -> Result<Composition, GenError> {
    if mask.dims() != canvas {
        return Err(GenError::MaskMismatch {
            mask: mask.dims(),
            canvas,
        });
    }
    if p_c.kind() != kind || p_b.kind() != kind {
        return Err(GenError::KindMismatch);
    }
    if p_c == p_b {
        return Err(GenError::IdenticalParams);
    }
    let t_c = generate_texture(p_c, canvas, seed)?;
    let t_b = generate_texture(p_b, canvas, seed)?;
    let values = mask
        .bits
        .iter()
        .zip(t_c.values().iter().zip(t_b.values()))
        .map(|(&m, (&c, &b))| if m { c } else { b })
        .collect();
    let illusion = FloatPlane::new(canvas.1, canvas.0, values)?;
    Ok(Composition {
        illusion: RasterImage::from_plane(&illusion),
        background: RasterImage::from_plane(&t_b),
    })
}

/// Fraction of mask pixels whose `(2r+1)²` neighbourhood contains a pixel
/// where the illusion differs from the pure background. An empty mask scores 1.
pub fn region_fidelity(illusion: &RasterImage, background: &RasterImage, mask: &Mask, radius: usize) -> f64 {
    assert_eq!(illusion.dims(), mask.dims(), "illusion and mask dims differ");
    assert_eq!(background.dims(), mask.dims(), "background and mask dims differ");
    let (h, w) = mask.dims();
    let c = illusion.channels().count();
    let diff: Vec<bool> = illusion
        .data()
        .chunks_exact(c)
        .zip(background.data().chunks_exact(c))
        .map(|(a, b)| a != b)
        .collect();

    // Summed-area table with a zero border row and column.
    let mut sat = vec![0u32; (h + 1) * (w + 1)];
    for y in 0..h {
        let mut row = 0u32;
        for x in 0..w {
            row += u32::from(diff[y * w + x]);
            sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
        }
    }
    let window = |x: usize, y: usize| {
        let (x0, y0) = (x.saturating_sub(radius), y.saturating_sub(radius));
        let (x1, y1) = ((x + radius + 1).min(w), (y + radius + 1).min(h));
        sat[y1 * (w + 1) + x1] + sat[y0 * (w + 1) + x0] - sat[y0 * (w + 1) + x1] - sat[y1 * (w + 1) + x0]
    };
    let (mut total, mut hit) = (0usize, 0usize);
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                total += 1;
                if window(x, y) > 0 {
                    hit += 1;
                }
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        hit as f64 / total as f64
    }
}
