use crate::error::{Error, Result};
use crate::raster::{gradient_magnitude, GradientField, ImageF, PixelMask};

/// Denominators below this are treated as an already flat input.
const FLAT_DENOMINATOR: f64 = 1e-12;

/// Sum of gradient magnitudes over the mask (all pixels when `None`).
/// Summation runs in raster order.
pub fn masked_gradient_sum(field: &GradientField, mask: Option<&PixelMask>) -> f64 {
    match mask {
        None => field.mag().iter().sum(),
        Some(m) => field
            .mag()
            .iter()
            .zip(m.bits())
            .filter(|(_, b)| **b)
            .map(|(g, _)| g)
            .sum(),
    }
}

/// SO from precomputed gradient fields.
pub fn so_from_fields(
    original: &GradientField,
    smoothed: &GradientField,
    mask: Option<&PixelMask>,
) -> f64 {
    let den = masked_gradient_sum(original, mask);
    if den < FLAT_DENOMINATOR {
        return 1.0;
    }
    masked_gradient_sum(smoothed, mask) / den
}

/// Ratio of summed gradient magnitudes of `smoothed` over `original`,
/// restricted to `mask` when given. A flat input (vanishing denominator)
/// yields 1.
pub fn so_ratio(original: &ImageF, smoothed: &ImageF, mask: Option<&PixelMask>) -> Result<f64> {
    original.ensure_same_dims(smoothed)?;
    if let Some(m) = mask {
        if m.dims() != original.dims() {
            return Err(Error::DimensionMismatch {
                expected: original.dims(),
                actual: m.dims(),
            });
        }
    }
    Ok(so_from_fields(
        &gradient_magnitude(original),
        &gradient_magnitude(smoothed),
        mask,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> ImageF {
        ImageF::from_fn(6, 5, 1, |x, y, _| (x * x + y) as f64 / 40.0).unwrap()
    }

    #[test]
    fn identity_is_one() {
        let i = ramp();
        assert_eq!(so_ratio(&i, &i, None).unwrap(), 1.0);
    }

    #[test]
    fn constant_output_is_zero() {
        let i = ramp();
        let j = ImageF::filled(6, 5, 1, 0.4).unwrap();
        assert_eq!(so_ratio(&i, &j, None).unwrap(), 0.0);
    }

    #[test]
    fn flat_input_is_one() {
        let i = ImageF::filled(6, 5, 1, 0.4).unwrap();
        assert_eq!(so_ratio(&i, &ramp(), None).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_mask() {
        let i = ramp();
        let m = PixelMask::full(3, 3);
        assert!(so_ratio(&i, &i, Some(&m)).is_err());
        let j = ImageF::filled(5, 5, 1, 0.4).unwrap();
        assert!(so_ratio(&i, &j, None).is_err());
    }
}
