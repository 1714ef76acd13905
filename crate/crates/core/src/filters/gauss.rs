use crate::error::Result;
use crate::raster::{ImageF, Plane};

/// Normalized 1-D Gaussian taps over `[-radius, radius]`, radius = ceil(4 sigma).
pub(crate) fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (4.0 * sigma).ceil().max(1.0) as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable convolution with replicated borders.
pub(crate) fn convolve_separable(plane: &Plane, kernel: &[f64]) -> Plane {
    let r = (kernel.len() / 2) as isize;
    let (w, h) = (plane.width, plane.height);
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &plane.data[y * w..(y + 1) * w];
        for x in 0..w {
            tmp[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, kv)| kv * row[clamp(x as isize + k as isize - r, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, kv)| kv * tmp[clamp(y as isize + k as isize - r, h) * w + x])
                .sum();
        }
    }
    Plane::new(w, h, out)
}

pub(crate) fn blur_plane(plane: &Plane, sigma: f64) -> Plane {
    convolve_separable(plane, &gaussian_kernel(sigma))
}

/// Isotropic Gaussian blur of every channel.
pub fn gaussian_blur(img: &ImageF, sigma: f64) -> Result<ImageF> {
    if sigma <= 0.0 {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma);
    img.map_planes(|p| convolve_separable(p, &kernel))
}
