//! Domain transform, recursive-filter variant.

use crate::error::Result;
use crate::raster::{luminance, ImageF, Plane};

pub(crate) const DEFAULT_SIGMA_S: f64 = 60.0;
pub(crate) const DEFAULT_ITERATIONS: usize = 3;

/// One left-to-right and right-to-left recursive pass over every row.
/// `coeff[y*w + x]` couples pixel x-1 to x.
fn recursive_rows(plane: &mut Plane, coeff: &[f64]) {
    let w = plane.width;
    for y in 0..plane.height {
        let row = &mut plane.data[y * w..(y + 1) * w];
        let a = &coeff[y * w..(y + 1) * w];
        for x in 1..w {
            row[x] += a[x] * (row[x - 1] - row[x]);
        }
        for x in (0..w - 1).rev() {
            row[x] += a[x + 1] * (row[x + 1] - row[x]);
        }
    }
}

/// Domain-transform derivative `1 + sigma_s / sigma_r * |dI|` along rows.
fn row_derivative(guide: &Plane, ratio: f64) -> Vec<f64> {
    let w = guide.width;
    let mut d = vec![1.0; guide.data.len()];
    for y in 0..guide.height {
        for x in 1..w {
            let i = y * w + x;
            d[i] = 1.0 + ratio * (guide.data[i] - guide.data[i - 1]).abs();
        }
    }
    d
}

/// Edge-aware smoothing by recursive filtering in the transformed domain.
/// The transform is computed from the luminance plane.
pub fn domain_transform(img: &ImageF, sigma_s: f64, sigma_r: f64, iterations: usize) -> Result<ImageF> {
    if sigma_r <= 0.0 || iterations == 0 {
        return Ok(img.clone());
    }
    let guide = luminance(img);
    let ratio = sigma_s / sigma_r;
    let dx = row_derivative(&guide, ratio);
    let dy = row_derivative(&guide.transpose(), ratio);
    let n = iterations as i32;
    let scale = (4f64.powi(n) - 1.0).sqrt();

    img.map_planes(|p| {
        let mut cur = p.clone();
        for i in 0..n {
            let sigma_h = sigma_s * 3f64.sqrt() * 2f64.powi(n - i - 1) / scale;
            let a = (-(2f64.sqrt()) / sigma_h).exp();
            let vx: Vec<f64> = dx.iter().map(|d| a.powf(*d)).collect();
            let vy: Vec<f64> = dy.iter().map(|d| a.powf(*d)).collect();
            recursive_rows(&mut cur, &vx);
            let mut t = cur.transpose();
            recursive_rows(&mut t, &vy);
            cur = t.transpose();
        }
        cur
    })
}
