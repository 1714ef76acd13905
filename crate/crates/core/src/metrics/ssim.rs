use crate::error::{Error, Result};
use crate::raster::{luminance, ImageF};

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const DYNAMIC_RANGE: f64 = 1.0;

fn window() -> Vec<f64> {
    let r = (WINDOW / 2) as f64;
    let mut w: Vec<f64> = (0..WINDOW * WINDOW)
        .map(|i| {
            let dx = (i % WINDOW) as f64 - r;
            let dy = (i / WINDOW) as f64 - r;
            (-(dx * dx + dy * dy) / (2.0 * SIGMA * SIGMA)).exp()
        })
        .collect();
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

/// Mean SSIM of the luminance planes over all window positions that lie
/// fully inside the image.
pub fn ssim(a: &ImageF, b: &ImageF) -> Result<f64> {
    a.ensure_same_dims(b)?;
    let (w, h) = a.dims();
    if w < WINDOW || h < WINDOW {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            reason: "SSIM needs at least an 11x11 image",
        });
    }
    let x = luminance(a).data;
    let y = luminance(b).data;
    let kernel = window();
    let c1 = (K1 * DYNAMIC_RANGE).powi(2);
    let c2 = (K2 * DYNAMIC_RANGE).powi(2);
    let mut total = 0.0;
    let positions = (w - WINDOW + 1) * (h - WINDOW + 1);
    for oy in 0..=h - WINDOW {
        for ox in 0..=w - WINDOW {
            let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for ky in 0..WINDOW {
                let row = (oy + ky) * w + ox;
                for kx in 0..WINDOW {
                    let g = kernel[ky * WINDOW + kx];
                    let (u, v) = (x[row + kx], y[row + kx]);
                    mx += g * u;
                    my += g * v;
                    sxx += g * u * u;
                    syy += g * v * v;
                    sxy += g * u * v;
                }
            }
            let vx = sxx - mx * mx;
            let vy = syy - my * my;
            let cov = sxy - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
    }
    Ok(total / positions as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(w: usize, h: usize) -> ImageF {
        ImageF::from_fn(w, h, 1, |x, y, _| ((x * 13 + y * 7) % 17) as f64 / 16.0).unwrap()
    }

    #[test]
    fn self_similarity() {
        let i = pattern(20, 16);
        assert!((ssim(&i, &i).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inverted_binary_is_dissimilar() {
        let i = ImageF::from_fn(24, 24, 1, |x, y, _| ((x / 3 + y / 2) % 2) as f64).unwrap();
        let inv = ImageF::from_fn(24, 24, 1, |x, y, _| 1.0 - i.get(x, y, 0)).unwrap();
        assert!(ssim(&i, &inv).unwrap() < 0.1);
    }

    #[test]
    fn symmetric() {
        let i = pattern(20, 16);
        let j = ImageF::from_fn(20, 16, 1, |x, y, _| ((x + y * 3) % 5) as f64 / 4.0).unwrap();
        assert!((ssim(&i, &j).unwrap() - ssim(&j, &i).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn rejects_small_images() {
        let i = pattern(10, 30);
        assert!(ssim(&i, &i).is_err());
    }
}
