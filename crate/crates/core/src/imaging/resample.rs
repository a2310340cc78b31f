use super::{check_dims, FloatPlane, ImageError};

/// Resampling strategy used by the perception transform.
pub trait Resampler: Send + Sync {
    fn resize(&self, plane: &FloatPlane, new_dims: (usize, usize)) -> Result<FloatPlane, ImageError>;
}

/// Area-averaging resampler.
///
/// Each output sample is the coverage-weighted mean of the source samples
/// its footprint overlaps. Overlaps are computed on an integer grid of
/// `src * dst` units, so integer-valued constant planes stay bit-exact.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoxResampler;

impl Resampler for BoxResampler {
    fn resize(&self, plane: &FloatPlane, new_dims: (usize, usize)) -> Result<FloatPlane, ImageError> {
        let (new_h, new_w) = new_dims;
        check_dims(new_w, new_h)?;
        let (h, w) = plane.dims();

        let col_taps = axis_taps(w, new_w);
        let mut horizontal = Vec::with_capacity(h * new_w);
        for y in 0..h {
            let row = plane.row(y);
            for taps in &col_taps {
                horizontal.push(apply_taps(taps, w, |j| row[j]));
            }
        }

        let row_taps = axis_taps(h, new_h);
        let mut values = Vec::with_capacity(new_h * new_w);
        for taps in &row_taps {
            for x in 0..new_w {
                values.push(apply_taps(taps, h, |i| horizontal[i * new_w + x]));
            }
        }
        FloatPlane::new(new_w, new_h, values)
    }
}

/// `(source index, overlap)` pairs for every destination index; overlaps of
/// one destination sum to `src`.
fn axis_taps(src: usize, dst: usize) -> Vec<Vec<(usize, u64)>> {
    let (src64, dst64) = (src as u64, dst as u64);
    (0..dst64)
        .map(|i| {
            let lo = i * src64;
            let hi = lo + src64;
            let first = lo / dst64;
            let last = (hi - 1) / dst64;
            (first..=last)
                .map(|j| {
                    let s_lo = j * dst64;
                    let s_hi = s_lo + dst64;
                    (j as usize, hi.min(s_hi) - lo.max(s_lo))
                })
                .collect()
        })
        .collect()
}

fn apply_taps(taps: &[(usize, u64)], src: usize, sample: impl Fn(usize) -> f64) -> f64 {
    let acc: f64 = taps.iter().map(|&(j, wgt)| wgt as f64 * sample(j)).sum();
    acc / src as f64
}

/// Box resampling to `(h, w)`.
pub fn resize(plane: &FloatPlane, new_dims: (usize, usize)) -> Result<FloatPlane, ImageError> {
    BoxResampler.resize(plane, new_dims)
}

/// Pastes `plane` onto a white canvas of `(H, W)`, top/left margins floored.
pub fn pad_center_white(plane: &FloatPlane, canvas: (usize, usize)) -> Result<FloatPlane, ImageError> {
    let (canvas_h, canvas_w) = canvas;
    check_dims(canvas_w, canvas_h)?;
    let (h, w) = plane.dims();
    if h > canvas_h || w > canvas_w {
        return Err(ImageError::ContentLargerThanCanvas {
            content_w: w,
            content_h: h,
            canvas_w,
            canvas_h,
        });
    }
    let top = (canvas_h - h) / 2;
    let left = (canvas_w - w) / 2;
    let mut out = FloatPlane::filled(canvas_w, canvas_h, 255.0)?;
    for y in 0..h {
        let dst = (top + y) * canvas_w + left;
        out.values_mut()[dst..dst + w].copy_from_slice(plane.row(y));
    }
    Ok(out)
}
