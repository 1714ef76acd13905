use serde::{Deserialize, Serialize};

use super::{contrast_ratio, delta_brightness, delta_color, smooth_mask, so_from_fields};
use crate::error::Result;
use crate::raster::{gradient_magnitude, ImageF, PixelMask};

/// All attributes of one (input, smoothed) pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeReport {
    pub so: f64,
    pub so_smooth: f64,
    pub so_edge: f64,
    pub delta_l: f64,
    pub delta_c: f64,
    pub contrast_ratio: f64,
}

impl AttributeReport {
    pub const CSV_HEADER: [&'static str; 6] = ["so", "so_smooth", "so_edge", "delta_l", "delta_c", "contrast_ratio"];

    pub fn identity() -> Self {
        Self {
            so: 1.0,
            so_smooth: 1.0,
            so_edge: 1.0,
            delta_l: 1.0,
            delta_c: 0.0,
            contrast_ratio: 1.0,
        }
    }

    pub fn csv_record(&self) -> [String; 6] {
        [
            self.so,
            self.so_smooth,
            self.so_edge,
            self.delta_l,
            self.delta_c,
            self.contrast_ratio,
        ]
        .map(|v| v.to_string())
    }

    /// Evaluates against a precomputed smooth mask of the original.
    pub fn with_mask(original: &ImageF, smoothed: &ImageF, smooth: &PixelMask) -> Result<Self> {
        original.ensure_same_dims(smoothed)?;
        let gi = gradient_magnitude(original);
        let gj = gradient_magnitude(smoothed);
        let edge = smooth.complement();
        Ok(Self {
            so: so_from_fields(&gi, &gj, None),
            so_smooth: so_from_fields(&gi, &gj, Some(smooth)),
            so_edge: so_from_fields(&gi, &gj, Some(&edge)),
            delta_l: delta_brightness(original, smoothed)?,
            delta_c: delta_color(original, smoothed)?,
            contrast_ratio: contrast_ratio(original, smoothed)?,
        })
    }
}

/// Full attribute report. Smooth and edge masks always come from the
/// original image.
pub fn full_report(original: &ImageF, smoothed: &ImageF) -> Result<AttributeReport> {
    original.ensure_same_dims(smoothed)?;
    AttributeReport::with_mask(original, smoothed, &smooth_mask(original))
}
