//! Deterministic synthetic test images: steps, ramps, checkerboards and
//! noise mixtures.
//!
//! Every image carries some fine texture or noise. A noise-free step or
//! ramp has no gradient that smoothing can remove without also moving the
//! edge, so its SO barely changes under edge-aware filters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::raster::ImageF;

/// Default side length of generated images.
pub const DEFAULT_SIZE: usize = 96;

/// Names of the generated images, in generation order.
pub const NAMES: [&str; 10] = [
    "step_noise",
    "ramp_texture",
    "fine_checker",
    "color_checker",
    "disk_noise",
    "stripes",
    "noise_mixture",
    "color_blocks",
    "color_ramp_step",
    "rings",
];

struct Noise(ChaCha8Rng);

impl Noise {
    /// Approximately Gaussian sample with the given standard deviation.
    fn gauss(&mut self, sigma: f64) -> f64 {
        // Irwin-Hall with 4 terms: variance 4/12.
        let s: f64 = (0..4).map(|_| self.0.gen::<f64>()).sum();
        (s - 2.0) * sigma * 3f64.sqrt()
    }
}

/// The ten-image synthetic corpus at `size x size` pixels.
pub fn corpus(size: usize, seed: u64) -> Vec<(String, ImageF)> {
    NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| (name.to_string(), image(i, size, seed)))
        .collect()
}

/// One synthetic image by index into [`NAMES`].
pub fn image(index: usize, size: usize, seed: u64) -> ImageF {
    let mut n = Noise(ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(index as u64)));
    let s = size as f64;
    let gray = |f: &mut dyn FnMut(f64, f64) -> f64| {
        ImageF::from_fn(size, size, 1, |x, y, _| f(x as f64, y as f64)).expect("valid dims")
    };
    match index {
        0 => gray(&mut |x, _| (if x < s / 2.0 { 0.25 } else { 0.75 }) + n.gauss(0.04)),
        1 => gray(&mut |x, y| 0.15 + 0.7 * x / s + 0.05 * ((x * 1.3).sin() * (y * 1.7).cos()) + n.gauss(0.02)),
        2 => gray(&mut |x, y| {
            let c = ((x as usize / 2 + y as usize / 2) % 2) as f64;
            0.3 + 0.4 * c + n.gauss(0.03)
        }),
        3 => {
            let mut noise = Vec::with_capacity(size * size * 3);
            for _ in 0..size * size * 3 {
                noise.push(n.gauss(0.03));
            }
            ImageF::from_fn(size, size, 3, |x, y, c| {
                let cell = (x / 12 + y / 12) % 2;
                let base = if cell == 0 { [0.8, 0.2, 0.2] } else { [0.1, 0.4, 0.8] };
                base[c] + noise[(y * size + x) * 3 + c]
            })
            .expect("valid dims")
        }
        4 => gray(&mut |x, y| {
            let r = ((x - s / 2.0).powi(2) + (y - s / 2.0).powi(2)).sqrt();
            let base = if r < s / 4.0 { 0.8 } else { 0.2 };
            base + n.gauss(0.05)
        }),
        5 => gray(&mut |x, y| 0.5 + 0.3 * (x * 0.6).sin() + 0.1 * (y * 0.15).sin() + n.gauss(0.02)),
        6 => gray(&mut |x, y| {
            // Smooth background with patches of coarse and fine noise.
            let base = 0.5 + 0.2 * ((x + y) / s - 1.0);
            let sigma = if x < s / 2.0 { 0.02 } else { 0.1 };
            let patch = if y > s / 2.0 && x > s / 4.0 && x < 3.0 * s / 4.0 { 0.1 } else { 0.0 };
            base + patch + n.gauss(sigma)
        }),
        7 => {
            let mut noise = Vec::with_capacity(size * size * 3);
            for _ in 0..size * size * 3 {
                noise.push(n.gauss(0.025));
            }
            let palette = [[0.9, 0.8, 0.1], [0.1, 0.6, 0.3], [0.7, 0.1, 0.6], [0.2, 0.2, 0.3]];
            ImageF::from_fn(size, size, 3, |x, y, c| {
                let block = 2 * (2 * y / size) + 2 * x / size;
                palette[block][c] + noise[(y * size + x) * 3 + c]
            })
            .expect("valid dims")
        }
        8 => {
            let mut noise = Vec::with_capacity(size * size * 3);
            for _ in 0..size * size * 3 {
                noise.push(n.gauss(0.03));
            }
            ImageF::from_fn(size, size, 3, |x, y, c| {
                let t = x as f64 / s;
                let v = match c {
                    0 => 0.2 + 0.6 * t,
                    1 => if y < size / 2 { 0.3 } else { 0.7 },
                    _ => 0.8 - 0.6 * t,
                };
                v + noise[(y * size + x) * 3 + c]
            })
            .expect("valid dims")
        }
        9 => gray(&mut |x, y| {
            let r = ((x - s / 2.0).powi(2) + (y - s / 2.0).powi(2)).sqrt();
            0.5 + 0.35 * (r * 0.5).sin() + n.gauss(0.03)
        }),
        _ => panic!("synthetic image index {index} out of range"),
    }
}
