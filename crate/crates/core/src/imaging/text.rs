//! Glyph rendering for the clean "original" images: black text centered on a
//! white canvas, sized so the ink bounding box lands in a requested scale class.

use std::path::Path;
use std::sync::{Arc, OnceLock};

use ab_glyph::{point, Font as _, FontArc, PxScale, ScaleFont as _};
use serde::{Deserialize, Serialize};

use super::{quantize, Channels, ImageError, RasterImage};
use crate::illugen::{classify_scale, ScaleClass};

static BUILTIN_FONT_BYTES: &[u8] = include_bytes!("../../assets/fonts/DejaVuSans-Bold.ttf");

/// Smallest pixel size considered legible; smaller renders are rejected.
const MIN_GLYPH_PX: f32 = 6.0;

/// A parsed TrueType/OpenType font.
#[derive(Clone)]
pub struct Font {
    inner: FontArc,
}

impl std::fmt::Debug for Font {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Font").finish_non_exhaustive()
    }
}

impl Font {
    /// DejaVu Sans Bold, compiled into the binary. Covers Latin, digits and
    /// the micro-text symbols, but no CJK.
    pub fn builtin() -> Font {
        static BUILTIN: OnceLock<Font> = OnceLock::new();
        BUILTIN
            .get_or_init(|| Font::from_bytes(BUILTIN_FONT_BYTES.to_vec()).expect("bundled font parses"))
            .clone()
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Font, ImageError> {
        let inner = FontArc::try_from_vec(bytes).map_err(|e| ImageError::InvalidFont(e.to_string()))?;
        Ok(Font { inner })
    }

    pub fn from_path(path: &Path) -> Result<Font, ImageError> {
        let bytes = std::fs::read(path).map_err(|source| ImageError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Font::from_bytes(bytes)
    }

    pub fn covers(&self, c: char) -> bool {
        c.is_whitespace() || self.inner.glyph_id(c).0 != 0
    }

    /// Rasterizes one line of text at `px` pixels per em.
    pub(crate) fn render_line(&self, text: &str, px: f32) -> Result<TextBitmap, ImageError> {
        if let Some(c) = text.chars().find(|&c| !self.covers(c)) {
            return Err(ImageError::MissingGlyph(c));
        }
        let scale = PxScale::from(px);
        let scaled = self.inner.as_scaled(scale);
        let mut caret = 0.0f32;
        let mut prev = None;
        let mut outlines = Vec::new();
        for c in text.chars() {
            let id = self.inner.glyph_id(c);
            if let Some(p) = prev {
                caret += scaled.kern(p, id);
            }
            let glyph = id.with_scale_and_position(scale, point(caret, scaled.ascent()));
            caret += scaled.h_advance(id);
            prev = Some(id);
            if let Some(outlined) = self.inner.outline_glyph(glyph) {
                outlines.push(outlined);
            }
        }

        let Some(first) = outlines.first() else {
            return Ok(TextBitmap::blank());
        };
        let mut min_x = first.px_bounds().min.x;
        let mut min_y = first.px_bounds().min.y;
        let mut max_x = first.px_bounds().max.x;
        let mut max_y = first.px_bounds().max.y;
        for o in &outlines[1..] {
            let b = o.px_bounds();
            min_x = min_x.min(b.min.x);
            min_y = min_y.min(b.min.y);
            max_x = max_x.max(b.max.x);
            max_y = max_y.max(b.max.y);
        }
        let (ox, oy) = (min_x.floor() as i64, min_y.floor() as i64);
        let width = (max_x.ceil() as i64 - ox).max(1) as usize;
        let height = (max_y.ceil() as i64 - oy).max(1) as usize;
        let mut coverage = vec![0.0f32; width * height];
        for o in &outlines {
            let b = o.px_bounds();
            let (bx, by) = (b.min.x as i64 - ox, b.min.y as i64 - oy);
            o.draw(|x, y, c| {
                let (px, py) = (bx + x as i64, by + y as i64);
                if px >= 0 && py >= 0 && (px as usize) < width && (py as usize) < height {
                    let cell = &mut coverage[py as usize * width + px as usize];
                    *cell = cell.max(c.min(1.0));
                }
            });
        }
        Ok(TextBitmap::new(width, height, coverage))
    }
}

/// Coverage raster of a line of text with its ink bounding box.
pub(crate) struct TextBitmap {
    pub width: usize,
    pub height: usize,
    pub coverage: Vec<f32>,
    /// `(x0, y0, x1, y1)` inclusive, over pixels that quantize darker than 128.
    pub ink: Option<(usize, usize, usize, usize)>,
}

impl TextBitmap {
    fn blank() -> Self {
        Self {
            width: 1,
            height: 1,
            coverage: vec![0.0],
            ink: None,
        }
    }

    fn new(width: usize, height: usize, coverage: Vec<f32>) -> Self {
        let mut ink: Option<(usize, usize, usize, usize)> = None;
        for y in 0..height {
            for x in 0..width {
                if is_ink(coverage[y * width + x]) {
                    ink = Some(match ink {
                        None => (x, y, x, y),
                        Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                    });
                }
            }
        }
        Self {
            width,
            height,
            coverage,
            ink,
        }
    }

    /// Ink bbox as `(C_H, C_W)`.
    pub fn ink_size(&self) -> Option<(usize, usize)> {
        self.ink.map(|(x0, y0, x1, y1)| (y1 - y0 + 1, x1 - x0 + 1))
    }

    pub fn value(&self, x: usize, y: usize) -> u8 {
        coverage_to_gray(self.coverage[y * self.width + x])
    }
}

fn coverage_to_gray(c: f32) -> u8 {
    quantize(255.0 * (1.0 - f64::from(c)))
}

fn is_ink(c: f32) -> bool {
    coverage_to_gray(c) < 128
}

/// Realized placement of rendered text on its canvas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlyphLayout {
    pub text: String,
    /// `(C_H, C_W)`: ink bounding box height and width.
    pub bbox: (usize, usize),
    /// `(x, y)` of the bbox's top-left corner on the canvas.
    pub origin: (usize, usize),
    /// `(H, W)` of the canvas the layout refers to.
    pub canvas: (usize, usize),
}

impl GlyphLayout {
    pub fn max_extent(&self) -> usize {
        self.bbox.0.max(self.bbox.1)
    }
}

/// Ink extent aimed for in each class, as a fraction of `min(H, W)`.
fn target_fraction(scale: ScaleClass) -> Option<f64> {
    match scale {
        ScaleClass::Large => Some(0.8),
        ScaleClass::Medium => Some(0.35),
        ScaleClass::Small => Some(0.1),
        ScaleClass::Unclassified => None,
    }
}

/// Renders `text` in black on a white `(H, W)` canvas, centering its ink
/// bounding box and picking the pixel size so the bbox falls in `target`.
pub fn render_characters(
    text: &str,
    canvas: (usize, usize),
    font: &Font,
    target: ScaleClass,
) -> Result<(RasterImage, GlyphLayout), ImageError> {
    let (canvas_h, canvas_w) = canvas;
    if text.chars().all(char::is_whitespace) {
        return Err(ImageError::EmptyText);
    }
    let unreachable = || ImageError::UnreachableScale {
        text: text.to_string(),
        scale: target.to_string(),
        width: canvas_w,
        height: canvas_h,
    };
    let goal = target_fraction(target).ok_or_else(unreachable)? * canvas_h.min(canvas_w) as f64;

    // Ink extent is close to linear in pixel size; a few secant steps land
    // well inside the class interval.
    let mut px = 128.0f32;
    let mut bitmap = font.render_line(text, px)?;
    for _ in 0..6 {
        let Some((ch, cw)) = bitmap.ink_size() else {
            return Err(unreachable());
        };
        let extent = ch.max(cw) as f64;
        if (extent - goal).abs() <= 1.0 {
            break;
        }
        px = (f64::from(px) * goal / extent) as f32;
        if px < MIN_GLYPH_PX {
            return Err(unreachable());
        }
        bitmap = font.render_line(text, px)?;
    }
    let (x0, y0, x1, y1) = bitmap.ink.ok_or_else(unreachable)?;
    let (c_h, c_w) = (y1 - y0 + 1, x1 - x0 + 1);
    if c_h > canvas_h || c_w > canvas_w {
        return Err(unreachable());
    }
    let layout = GlyphLayout {
        text: text.to_string(),
        bbox: (c_h, c_w),
        origin: ((canvas_w - c_w) / 2, (canvas_h - c_h) / 2),
        canvas,
    };
    if classify_scale(&layout) != target {
        return Err(unreachable());
    }

    let mut data = vec![255u8; canvas_h * canvas_w];
    let dx = layout.origin.0 as i64 - x0 as i64;
    let dy = layout.origin.1 as i64 - y0 as i64;
    for y in 0..bitmap.height {
        let cy = y as i64 + dy;
        if cy < 0 || cy >= canvas_h as i64 {
            continue;
        }
        for x in 0..bitmap.width {
            let cx = x as i64 + dx;
            if cx < 0 || cx >= canvas_w as i64 {
                continue;
            }
            data[cy as usize * canvas_w + cx as usize] = bitmap.value(x, y);
        }
    }
    let image = RasterImage::new(canvas_w, canvas_h, Channels::Gray, data)?;
    Ok((image, layout))
}

/// Builtin-font symbol rasters keyed by `(char, px)`, shared across threads.
pub(crate) fn builtin_symbol(c: char, px: u32) -> Result<Arc<TextBitmap>, ImageError> {
    use std::collections::HashMap;
    use std::sync::Mutex;
    type SymbolCache = Mutex<HashMap<(char, u32), Arc<TextBitmap>>>;
    static CACHE: OnceLock<SymbolCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("symbol cache poisoned").get(&(c, px)) {
        return Ok(Arc::clone(hit));
    }
    let bitmap = Arc::new(Font::builtin().render_line(&c.to_string(), px as f32)?);
    cache
        .lock()
        .expect("symbol cache poisoned")
        .insert((c, px), Arc::clone(&bitmap));
    Ok(bitmap)
}
