use rayon::prelude::*;

use crate::error::Result;
use crate::raster::{luminance, ImageF};

/// Brute-force bilateral filter.
///
/// The window spans `ceil(3 sigma_d)` pixels in each direction and is
/// clipped at the image border. Range weights compare luminance, and the
/// same weights average every channel.
pub fn bilateral(img: &ImageF, sigma_r: f64, sigma_d: f64) -> Result<ImageF> {
    if sigma_r <= 0.0 || sigma_d <= 0.0 {
        return Ok(img.clone());
    }
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let lum = luminance(img).data;
    let radius = (3.0 * sigma_d).ceil().max(1.0) as isize;
    let side = (2 * radius + 1) as usize;
    let spatial: Vec<f64> = (-radius..=radius)
        .flat_map(|dy| (-radius..=radius).map(move |dx| (dx, dy)))
        .map(|(dx, dy)| (-((dx * dx + dy * dy) as f64) / (2.0 * sigma_d * sigma_d)).exp())
        .collect();
    let inv_range = 1.0 / (2.0 * sigma_r * sigma_r);
    let src = img.data();

    let mut out = vec![0.0; w * h * c];
    out.par_chunks_mut(w * c).enumerate().for_each(|(y, row)| {
        let mut acc = [0.0f64; 3];
        for x in 0..w {
            let center = lum[y * w + x];
            acc[..c].fill(0.0);
            let mut norm = 0.0;
            let y0 = (y as isize - radius).max(0);
            let y1 = (y as isize + radius).min(h as isize - 1);
            let x0 = (x as isize - radius).max(0);
            let x1 = (x as isize + radius).min(w as isize - 1);
            for ny in y0..=y1 {
                let krow = (ny - y as isize + radius) as usize * side;
                for nx in x0..=x1 {
                    let q = ny as usize * w + nx as usize;
                    let d = lum[q] - center;
                    let wt = spatial[krow + (nx - x as isize + radius) as usize] * (-d * d * inv_range).exp();
                    norm += wt;
                    for ch in 0..c {
                        acc[ch] += wt * src[q * c + ch];
                    }
                }
            }
            for ch in 0..c {
                row[x * c + ch] = acc[ch] / norm;
            }
        }
    });
    ImageF::from_clamped(w, h, c, out)
}
