use crate::filters::gauss::blur_plane;
use crate::raster::{erode, luminance, plane_gradient_magnitude, ImageF, PixelMask};

/// Saliency above which a pixel is considered part of an edge.
pub const EDGE_THRESHOLD: f64 = 0.3;
/// Disk radius used to keep the smooth mask away from edges.
pub const EROSION_RADIUS: usize = 5;

const PRE_BLUR_SIGMA: f64 = 1.0;
const NORMALIZING_PERCENTILE: f64 = 0.99;

/// Per-pixel edge saliency in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMap {
    pub width: usize,
    pub height: usize,
    pub saliency: Vec<f64>,
}

impl EdgeMap {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.saliency[y * self.width + x]
    }
}

/// Gradient-based edge detector: Gaussian pre-blur of the luminance,
/// gradient magnitude, normalization by the 99th percentile (nearest rank),
/// clamped to `[0, 1]`.
pub fn edge_map(img: &ImageF) -> EdgeMap {
    let blurred = blur_plane(&luminance(img), PRE_BLUR_SIGMA);
    let mag = plane_gradient_magnitude(&blurred).into_plane().data;
    let mut sorted = mag.clone();
    sorted.sort_by(f64::total_cmp);
    let rank = ((NORMALIZING_PERCENTILE * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let mut scale = sorted[rank - 1];
    if scale <= 1e-12 {
        // Edges cover less than 1% of the image; fall back to the maximum.
        scale = *sorted.last().expect("non-empty image");
    }
    let saliency = if scale <= 1e-12 {
        vec![0.0; mag.len()]
    } else {
        mag.iter().map(|m| (m / scale).clamp(0.0, 1.0)).collect()
    };
    EdgeMap {
        width: img.width(),
        height: img.height(),
        saliency,
    }
}

/// Pixels far from salient edges: saliency at most the threshold, eroded
/// with a radius-5 disk. The edge mask is the complement.
pub fn smooth_mask(img: &ImageF) -> PixelMask {
    let edges = edge_map(img);
    let below = PixelMask::new(
        edges.width,
        edges.height,
        edges.saliency.iter().map(|s| *s <= EDGE_THRESHOLD).collect(),
    );
    erode(&below, EROSION_RADIUS)
}
