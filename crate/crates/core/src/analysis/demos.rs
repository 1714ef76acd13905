use crate::equivalency::{find_parameter_with_output, MatchResult};
use crate::error::{Error, Result};
use crate::filters::FilterInstance;
use crate::raster::ImageF;

pub const DEMO_LEVEL: f64 = 0.5;
pub const DEFAULT_BOOST: f64 = 2.0;

/// Abstraction: the matched smoothing of `image` at `level`.
pub fn abstraction_demo(filter: &FilterInstance, image: &ImageF, level: f64) -> Result<(MatchResult, ImageF)> {
    find_parameter_with_output(filter, image, level)
}

/// `J + boost (I - J)` per sample, before clamping, written as
/// `(1 - boost) J + boost I` so that boost 1 gives `I` and boost 0 gives `J`
/// exactly.
pub fn detail_enhance_unclamped(original: &ImageF, smoothed: &ImageF, boost: f64) -> Result<Vec<f64>> {
    original.ensure_same_dims(smoothed)?;
    if original.channels() != smoothed.channels() {
        return Err(Error::InvalidImage(format!(
            "channel count mismatch: {} vs {}",
            original.channels(),
            smoothed.channels()
        )));
    }
    if !(boost.is_finite() && boost >= 0.0) {
        return Err(Error::InvalidArgument(format!("boost {boost} must be a finite value >= 0")));
    }
    Ok(original
        .data()
        .iter()
        .zip(smoothed.data())
        .map(|(i, j)| (1.0 - boost) * j + boost * i)
        .collect())
}

/// Detail enhancement with a given base layer, clamped to `[0, 1]`.
pub fn detail_enhance(original: &ImageF, smoothed: &ImageF, boost: f64) -> Result<ImageF> {
    let data = detail_enhance_unclamped(original, smoothed, boost)?;
    ImageF::from_clamped(original.width(), original.height(), original.channels(), data)
}

/// Detail enhancement on the matched smoothing at `level`.
pub fn detail_enhance_demo(
    filter: &FilterInstance,
    image: &ImageF,
    level: f64,
    boost: f64,
) -> Result<(MatchResult, ImageF)> {
    let (m, smoothed) = find_parameter_with_output(filter, image, level)?;
    Ok((m, detail_enhance(image, &smoothed, boost)?))
}
