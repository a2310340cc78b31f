use std::fs;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{ColorType, DynamicImage, ExtendedColorType, ImageEncoder};

use super::{Channels, ImageError, RasterImage};

/// Encodes as 8-bit non-interlaced PNG.
pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>, ImageError> {
    let mut buf = Vec::new();
    let color = match img.channels() {
        Channels::Gray => ExtendedColorType::L8,
        Channels::Rgb => ExtendedColorType::Rgb8,
    };
    PngEncoder::new(&mut buf).write_image(
        img.data(),
        img.width() as u32,
        img.height() as u32,
        color,
    )?;
    Ok(buf)
}

pub fn decode_png(bytes: &[u8]) -> Result<RasterImage, ImageError> {
    from_dynamic(image::load_from_memory(bytes)?)
}

pub fn save_png(img: &RasterImage, path: &Path) -> Result<(), ImageError> {
    let bytes = encode_png(img)?;
    fs::write(path, bytes).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads any format the decoder understands. Gray (with or without alpha)
/// stays single-channel; everything else becomes RGB with alpha dropped.
pub fn load_image(path: &Path) -> Result<RasterImage, ImageError> {
    let bytes = fs::read(path).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_dynamic(image::load_from_memory(&bytes)?)
}

fn from_dynamic(img: DynamicImage) -> Result<RasterImage, ImageError> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img.color() {
        ColorType::L8 | ColorType::La8 | ColorType::L16 | ColorType::La16 => {
            RasterImage::new(w, h, Channels::Gray, img.into_luma8().into_raw())
        }
        _ => RasterImage::new(w, h, Channels::Rgb, img.into_rgb8().into_raw()),
    }
}
