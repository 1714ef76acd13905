use crate::error::Result;
use crate::raster::{to_lab, ImageF};

/// Pixels whose original lightness is below this (on the 0-100 scale) are
/// left out of the brightness ratio.
pub const BRIGHTNESS_MIN_L: f64 = 0.5;

/// Mean of `L(J) / L(I)` over pixels with `L(I) >= 0.5`; 1 when no pixel
/// qualifies.
pub fn delta_brightness(original: &ImageF, smoothed: &ImageF) -> Result<f64> {
    original.ensure_same_dims(smoothed)?;
    let li = to_lab(original).l;
    let lj = to_lab(smoothed).l;
    let (sum, count) = li
        .iter()
        .zip(&lj)
        .filter(|(i, _)| **i >= BRIGHTNESS_MIN_L)
        .fold((0.0, 0usize), |(s, n), (i, j)| (s + j / i, n + 1));
    Ok(if count == 0 { 1.0 } else { sum / count as f64 })
}

/// Mean Euclidean distance between the (a, b) chroma of `I` and `J`.
pub fn delta_color(original: &ImageF, smoothed: &ImageF) -> Result<f64> {
    original.ensure_same_dims(smoothed)?;
    let li = to_lab(original);
    let lj = to_lab(smoothed);
    let sum: f64 = (0..li.a.len())
        .map(|p| (li.a[p] - lj.a[p]).hypot(li.b[p] - lj.b[p]))
        .sum();
    Ok(sum / li.a.len() as f64)
}
