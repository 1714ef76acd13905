//! Global contrast factor: weighted sum of mean local contrasts over nine
//! successively halved resolutions.

use crate::error::{Error, Result};
use crate::raster::ImageF;

use crate::raster::color::srgb_to_y;

pub const GCF_LEVELS: usize = 9;

fn level_weight(i: usize) -> f64 {
    let t = i as f64 / GCF_LEVELS as f64;
    (-0.406385 * t + 0.334573) * t + 0.0877526
}

/// Perceptual luminance `100 * sqrt(Y)`.
fn perceptual_luminance(img: &ImageF) -> Vec<f64> {
    (0..img.pixel_count())
        .map(|i| 100.0 * srgb_to_y(img.rgb(i)).max(0.0).sqrt())
        .collect()
}

/// Mean over pixels of the average absolute difference to the in-bounds
/// 4-neighbors.
fn mean_local_contrast(lum: &[f64], w: usize, h: usize) -> f64 {
    if w * h < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let v = lum[y * w + x];
            let mut sum = 0.0;
            let mut n = 0;
            if x > 0 {
                sum += (v - lum[y * w + x - 1]).abs();
                n += 1;
            }
            if x + 1 < w {
                sum += (v - lum[y * w + x + 1]).abs();
                n += 1;
            }
            if y > 0 {
                sum += (v - lum[(y - 1) * w + x]).abs();
                n += 1;
            }
            if y + 1 < h {
                sum += (v - lum[(y + 1) * w + x]).abs();
                n += 1;
            }
            total += sum / n as f64;
        }
    }
    total / (w * h) as f64
}

/// Averages 2x2 blocks; a trailing odd row or column forms smaller blocks.
fn halve(lum: &[f64], w: usize, h: usize) -> (Vec<f64>, usize, usize) {
    let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
    let mut out = Vec::with_capacity(nw * nh);
    for by in 0..nh {
        for bx in 0..nw {
            let mut sum = 0.0;
            let mut n = 0;
            for y in 2 * by..(2 * by + 2).min(h) {
                for x in 2 * bx..(2 * bx + 2).min(w) {
                    sum += lum[y * w + x];
                    n += 1;
                }
            }
            out.push(sum / n as f64);
        }
    }
    (out, nw, nh)
}

pub fn gcf(img: &ImageF) -> Result<f64> {
    let (mut w, mut h) = img.dims();
    if w < 2 || h < 2 {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            reason: "the global contrast factor needs at least 2x2 pixels",
        });
    }
    let mut lum = perceptual_luminance(img);
    let mut total = 0.0;
    for i in 1..=GCF_LEVELS {
        if i > 1 {
            let (next, nw, nh) = halve(&lum, w, h);
            lum = next;
            w = nw;
            h = nh;
        }
        total += level_weight(i) * mean_local_contrast(&lum, w, h);
    }
    Ok(total)
}

/// `gcf(J) / gcf(I)`.
pub fn contrast_ratio(original: &ImageF, smoothed: &ImageF) -> Result<f64> {
    original.ensure_same_dims(smoothed)?;
    let base = gcf(original)?;
    if base <= 0.0 {
        return Err(Error::UndefinedContrast);
    }
    Ok(gcf(smoothed)? / base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_zero_contrast() {
        assert_eq!(gcf(&ImageF::filled(20, 13, 3, 0.7).unwrap()).unwrap(), 0.0);
        let flat = ImageF::filled(8, 8, 1, 0.2).unwrap();
        assert!(matches!(contrast_ratio(&flat, &flat), Err(Error::UndefinedContrast)));
    }

    #[test]
    fn too_small() {
        assert!(gcf(&ImageF::filled(1, 5, 1, 0.7).unwrap()).is_err());
    }

    #[test]
    fn pixel_checkerboard() {
        // Level 1: every neighbor differs by the white luminance; level 2
        // onward is flat.
        let img = ImageF::from_fn(16, 16, 1, |x, y, _| ((x + y) % 2) as f64).unwrap();
        let white = 100.0 * srgb_to_y([1.0; 3]).sqrt();
        let want = level_weight(1) * white;
        let got = gcf(&img).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn mirror_invariant() {
        let img = ImageF::from_fn(32, 16, 3, |x, y, c| ((x * 7 + y * y + c) % 13) as f64 / 12.0).unwrap();
        let a = gcf(&img).unwrap();
        let b = gcf(&img.flip_horizontal()).unwrap();
        assert!((a - b).abs() < 1e-9 * a.max(1.0));
    }
}
