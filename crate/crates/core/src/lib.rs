//! Hidden-character illusion tooling.
//!
//! The crate is organised along the processing chain:
//!
//! - [`imaging`]: pixel buffers, grayscale conversion, box resampling,
//!   white-canvas padding and glyph rendering.
//! - [`spectral`]: centered 2-D DFT, radial energy curves, frequency bands and
//!   the ideal low-pass filter.
//! - [`perception`]: the perception transform (low-pass, downscale, pad), the
//!   geometric multi-scale schedule, tuple assembly, ablations and the two
//!   classical baselines.
//! - [`illugen`]: procedural noise textures, illusion composition, scale
//!   classification and dataset manifests.
//! - [`evalkit`]: prompt templates, hybrid string/judge scoring, accuracy
//!   aggregation and token-cost accounting.

pub mod evalkit;
pub mod illugen;
pub mod imaging;
pub mod perception;
pub mod spectral;

pub use imaging::{Channels, FloatPlane, Font, GlyphLayout, ImageError, RasterImage};
pub use perception::{PerceptionParams, SmspInput, SmspSchedule};
pub use spectral::{BandReport, EnergyCurve, Spectrum};
