use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::imaging::GlyphLayout;

/// Hidden-character size class, defined on a 1000×1000 canvas by the
/// largest side of the character's bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScaleClass {
    #[serde(alias = "large", alias = "L")]
    Large,
    #[serde(alias = "medium", alias = "M")]
    Medium,
    #[serde(alias = "small", alias = "S")]
    Small,
    #[serde(alias = "unclassified", alias = "U")]
    Unclassified,
}

impl ScaleClass {
    pub const CLASSIFIED: [ScaleClass; 3] = [ScaleClass::Large, ScaleClass::Medium, ScaleClass::Small];

    pub fn code(self) -> &'static str {
        match self {
            ScaleClass::Large => "L",
            ScaleClass::Medium => "M",
            ScaleClass::Small => "S",
            ScaleClass::Unclassified => "U",
        }
    }

    /// Classifies a bbox extent `max(C_H, C_W)` on a canvas whose shorter
    /// side is `min_side`; thresholds scale linearly from 1000.
    pub fn from_extent(max_extent: usize, min_side: usize) -> ScaleClass {
        let f = min_side as f64 / 1000.0;
        let m = max_extent as f64;
        if m >= 600.0 * f {
            ScaleClass::Large
        } else if m >= 200.0 * f && m <= 500.0 * f {
            ScaleClass::Medium
        } else if m <= 150.0 * f {
            ScaleClass::Small
        } else {
            ScaleClass::Unclassified
        }
    }
}

impl fmt::Display for ScaleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScaleClass::Large => "Large",
            ScaleClass::Medium => "Medium",
            ScaleClass::Small => "Small",
            ScaleClass::Unclassified => "Unclassified",
        };
        f.write_str(s)
    }
}

impl FromStr for ScaleClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l" | "large" => Ok(ScaleClass::Large),
            "m" | "medium" => Ok(ScaleClass::Medium),
            "s" | "small" => Ok(ScaleClass::Small),
            "u" | "unclassified" => Ok(ScaleClass::Unclassified),
            other => Err(format!("unknown scale class {other:?}")),
        }
    }
}

/// Scale class of a rendered layout, relative to its own canvas.
pub fn classify_scale(layout: &GlyphLayout) -> ScaleClass {
    let min_side = layout.canvas.0.min(layout.canvas.1);
    ScaleClass::from_extent(layout.max_extent(), min_side)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(c_h: usize, c_w: usize) -> GlyphLayout {
        GlyphLayout {
            text: "x".into(),
            bbox: (c_h, c_w),
            origin: (0, 0),
            canvas: (1000, 1000),
        }
    }

    #[test]
    fn reference_thresholds() {
        assert_eq!(classify_scale(&layout(650, 300)), ScaleClass::Large);
        assert_eq!(classify_scale(&layout(400, 100)), ScaleClass::Medium);
        assert_eq!(classify_scale(&layout(150, 80)), ScaleClass::Small);
        assert_eq!(classify_scale(&layout(170, 90)), ScaleClass::Unclassified);
        assert_eq!(classify_scale(&layout(100, 600)), ScaleClass::Large);
        assert_eq!(classify_scale(&layout(200, 1)), ScaleClass::Medium);
        assert_eq!(classify_scale(&layout(500, 1)), ScaleClass::Medium);
        assert_eq!(classify_scale(&layout(501, 1)), ScaleClass::Unclassified);
        assert_eq!(classify_scale(&layout(599, 1)), ScaleClass::Unclassified);
        assert_eq!(classify_scale(&layout(151, 1)), ScaleClass::Unclassified);
    }

    #[test]
    fn scaled_canvas() {
        // 256 canvas: Large >= 153.6, Medium 51.2..=128, Small <= 38.4
        assert_eq!(ScaleClass::from_extent(154, 256), ScaleClass::Large);
        assert_eq!(ScaleClass::from_extent(153, 256), ScaleClass::Unclassified);
        assert_eq!(ScaleClass::from_extent(38, 256), ScaleClass::Small);
        assert_eq!(ScaleClass::from_extent(52, 256), ScaleClass::Medium);
    }

    #[test]
    fn parse_and_display() {
        for s in ScaleClass::CLASSIFIED {
            assert_eq!(s.to_string().parse::<ScaleClass>().unwrap(), s);
            assert_eq!(s.code().parse::<ScaleClass>().unwrap(), s);
        }
        assert!("huge".parse::<ScaleClass>().is_err());
    }
}
