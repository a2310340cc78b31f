//! Illusion dataset generation: noise textures, region composition, scale
//! classes, dataset building and semantic-image import.

mod charsets;
mod compose;
mod dataset;
mod manifest;
mod scale;
mod texture;

use std::path::Path;

use thiserror::Error;

use crate::imaging::ImageError;

pub use charsets::{builtin_charset, parse_charset, CharsetSpec, BUILTIN_CHARSETS};
pub use compose::{compose_illusion, compose_with_background, region_fidelity, Composition, Mask};
pub use dataset::{
    build_dataset, category_counts, import_semantic, sample_seed, CategoryCounts, DatasetOutput, DatasetSpec,
    QualityFilter,
};
pub use manifest::{
    read_manifest, validate_manifest, validate_records, write_manifest, Background, BackgroundGroup, HiddenType,
    SampleRecord,
};
pub use scale::{classify_scale, ScaleClass};
pub use texture::{generate_texture, micro_text_layout, SymbolPlacement, TextureKind, TextureParams, TexturePair};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid texture parameters: {0}")]
    InvalidParams(String),
    #[error("mask is {mask:?} but the canvas is {canvas:?}")]
    MaskMismatch {
        mask: (usize, usize),
        canvas: (usize, usize),
    },
    #[error("character and background parameters are identical")]
    IdenticalParams,
    #[error("texture parameters do not match the requested kind")]
    KindMismatch,
    #[error("charset error: {0}")]
    Charset(String),
    #[error("no truth entry for image {0}")]
    MissingTruth(String),
    #[error("cannot read image {file}: {reason}")]
    UnreadableImage { file: String, reason: String },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl GenError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        GenError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
