use num_complex::Complex64;
use rustfft::FftPlanner;

use super::Spectrum;
use crate::imaging::FloatPlane;

/// Unnormalized forward 2-D DFT, shifted so DC lands at `(⌊H/2⌋, ⌊W/2⌋)`.
pub fn fft2d_centered(plane: &FloatPlane) -> Spectrum {
    let (h, w) = plane.dims();
    let mut buf: Vec<Complex64> = plane.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_2d(&mut buf, h, w, false);
    Spectrum::from_parts(w, h, shift(&buf, h, w, true))
}

/// Inverse of [`fft2d_centered`] (with `1/(H·W)`), followed by element-wise magnitude.
pub fn ifft2d_magnitude(spec: &Spectrum) -> FloatPlane {
    let (h, w) = (spec.height(), spec.width());
    let mut buf = shift(spec.coeffs(), h, w, false);
    transform_2d(&mut buf, h, w, true);
    let norm = (h * w) as f64;
    let values = buf.iter().map(|c| c.norm() / norm).collect();
    FloatPlane::new(w, h, values).expect("spectrum dims are valid")
}

fn transform_2d(buf: &mut [Complex64], h: usize, w: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h))
    } else {
        (planner.plan_fft_forward(w), planner.plan_fft_forward(h))
    };
    row_fft.process(buf);

    let mut column = vec![Complex64::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = buf[y * w + x];
        }
        col_fft.process(&mut column);
        for y in 0..h {
            buf[y * w + x] = column[y];
        }
    }
}

/// `forward == true` is fftshift (DC to center); otherwise ifftshift.
fn shift(src: &[Complex64], h: usize, w: usize, forward: bool) -> Vec<Complex64> {
    let (sh, sw) = if forward { (h / 2, w / 2) } else { (h - h / 2, w - w / 2) };
    let mut out = vec![Complex64::new(0.0, 0.0); h * w];
    for y in 0..h {
        let ny = (y + sh) % h;
        for x in 0..w {
            out[ny * w + (x + sw) % w] = src[y * w + x];
        }
    }
    out
}
