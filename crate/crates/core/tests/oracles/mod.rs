//! Brute-force reference implementations written directly from the
//! definitions: no summed-area tables, no separable passes, no iterative
//! solvers. Shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use epf_core::raster::{ImageF, PixelMask};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform random image with values in [0, 1].
pub fn random_image(w: usize, h: usize, c: usize, seed: u64) -> ImageF {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ImageF::new(w, h, c, (0..w * h * c).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

/// Piecewise image with a vertical step plus noise, closer to what the
/// edge-aware filters are designed for.
pub fn step_image(w: usize, h: usize, c: usize, seed: u64) -> ImageF {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ImageF::from_fn(w, h, c, |x, _, ch| {
        let base = if x < w / 2 { 0.25 } else { 0.75 } + 0.05 * ch as f64;
        (base + 0.1 * (rng.gen::<f64>() - 0.5)).clamp(0.0, 1.0)
    })
    .unwrap()
}

fn srgb_linear(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

/// CIE L* / 100 from sRGB, with the white luminance `Y(1, 1, 1)` of the
/// sRGB matrix row.
pub fn lightness(rgb: [f64; 3]) -> f64 {
    const ROW: [f64; 3] = [0.2126729, 0.7151522, 0.0721750];
    let white = ROW[0] + ROW[1] + ROW[2];
    let y = (ROW[0] * srgb_linear(rgb[0]) + ROW[1] * srgb_linear(rgb[1]) + ROW[2] * srgb_linear(rgb[2])) / white;
    let delta: f64 = 6.0 / 29.0;
    let f = if y > delta.powi(3) {
        y.cbrt()
    } else {
        y / (3.0 * delta * delta) + 4.0 / 29.0
    };
    (116.0 * f - 16.0) / 100.0
}

fn pixel_rgb(img: &ImageF, x: usize, y: usize) -> [f64; 3] {
    if img.channels() == 1 {
        [img.get(x, y, 0); 3]
    } else {
        [img.get(x, y, 0), img.get(x, y, 1), img.get(x, y, 2)]
    }
}

/// Lightness plane as a row-major grid.
pub fn lightness_grid(img: &ImageF) -> Vec<Vec<f64>> {
    (0..img.height())
        .map(|y| (0..img.width()).map(|x| lightness(pixel_rgb(img, x, y))).collect())
        .collect()
}

/// Forward-difference gradient magnitude of the lightness; the difference
/// past the last row or column is zero (replicated border).
pub fn gradient(img: &ImageF) -> Vec<Vec<f64>> {
    let l = lightness_grid(img);
    let (w, h) = (img.width(), img.height());
    let mut out = vec![vec![0.0; w]; h];
    for y in 0..h {
        for x in 0..w {
            let gx = l[y][(x + 1).min(w - 1)] - l[y][x];
            let gy = l[(y + 1).min(h - 1)][x] - l[y][x];
            out[y][x] = (gx * gx + gy * gy).sqrt();
        }
    }
    out
}

/// Erosion: p survives iff every in-bounds pixel within Euclidean distance
/// `radius` is set.
pub fn erode(mask: &PixelMask, radius: usize) -> PixelMask {
    let (w, h) = mask.dims();
    let r2 = (radius * radius) as i64;
    PixelMask::from_fn(w, h, |x, y| {
        for qy in 0..h {
            for qx in 0..w {
                let d2 = (qx as i64 - x as i64).pow(2) + (qy as i64 - y as i64).pow(2);
                if d2 <= r2 && !mask.get(qx, qy) {
                    return false;
                }
            }
        }
        true
    })
}

/// Bilateral filter with spatial support `ceil(3 sigma_d)` clipped at the
/// border and lightness range distance; output clamped to [0, 1].
pub fn bilateral(img: &ImageF, sigma_r: f64, sigma_d: f64) -> Vec<f64> {
    let l = lightness_grid(img);
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let r = (3.0 * sigma_d).ceil().max(1.0) as i64;
    let mut out = Vec::with_capacity(w * h * c);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = vec![0.0; c];
            let mut norm = 0.0;
            for qy in 0..h as i64 {
                for qx in 0..w as i64 {
                    if (qx - x).abs() > r || (qy - y).abs() > r {
                        continue;
                    }
                    let ds = ((qx - x).pow(2) + (qy - y).pow(2)) as f64;
                    let dr = l[qy as usize][qx as usize] - l[y as usize][x as usize];
                    let wt = (-ds / (2.0 * sigma_d * sigma_d)).exp() * (-dr * dr / (2.0 * sigma_r * sigma_r)).exp();
                    norm += wt;
                    for (ch, a) in acc.iter_mut().enumerate() {
                        *a += wt * img.get(qx as usize, qy as usize, ch);
                    }
                }
            }
            out.extend(acc.iter().map(|a| (a / norm).clamp(0.0, 1.0)));
        }
    }
    out
}

/// Mean of `f` over the square window of radius `r` around (x, y), clipped
/// to the image.
fn window_mean(w: usize, h: usize, x: usize, y: usize, r: usize, f: impl Fn(usize, usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut n = 0;
    for qy in y.saturating_sub(r)..=(y + r).min(h - 1) {
        for qx in x.saturating_sub(r)..=(x + r).min(w - 1) {
            sum += f(qx, qy);
            n += 1;
        }
    }
    sum / n as f64
}

/// Self-guided filter per channel, windows clipped at the border, output
/// clamped to [0, 1].
pub fn guided(img: &ImageF, r: usize, eps: f64) -> Vec<f64> {
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let mut out = vec![0.0; w * h * c];
    for ch in 0..c {
        let p = |x: usize, y: usize| img.get(x, y, ch);
        let mut a = vec![0.0; w * h];
        let mut b = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let mean = window_mean(w, h, x, y, r, p);
                let mean_sq = window_mean(w, h, x, y, r, |qx, qy| p(qx, qy).powi(2));
                let var = mean_sq - mean * mean;
                a[y * w + x] = var / (var + eps);
                b[y * w + x] = mean - a[y * w + x] * mean;
            }
        }
        for y in 0..h {
            for x in 0..w {
                let ma = window_mean(w, h, x, y, r, |qx, qy| a[qy * w + qx]);
                let mb = window_mean(w, h, x, y, r, |qx, qy| b[qy * w + qx]);
                out[(y * w + x) * c + ch] = (ma * p(x, y) + mb).clamp(0.0, 1.0);
            }
        }
    }
    out
}

/// Dense solve of `(I + lambda A) u = g` per channel, where `A` is the
/// 4-neighbor Laplacian weighted by `lambda / (|d log(L + 1e-4)|^alpha + eps)`.
pub fn wls(img: &ImageF, lambda: f64, alpha: f64, eps: f64) -> Vec<f64> {
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let n = w * h;
    let l = lightness_grid(img);
    let log = |x: usize, y: usize| (l[y][x] + 1e-4).ln();
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut couple = |i: usize, j: usize, d: f64| {
        let a = lambda / (d.abs().powf(alpha) + eps);
        m[(i, i)] += a;
        m[(j, j)] += a;
        m[(i, j)] -= a;
        m[(j, i)] -= a;
    };
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                couple(y * w + x, y * w + x + 1, log(x + 1, y) - log(x, y));
            }
            if y + 1 < h {
                couple(y * w + x, (y + 1) * w + x, log(x, y + 1) - log(x, y));
            }
        }
    }
    let lu = m.lu();
    let mut out = vec![0.0; n * c];
    for ch in 0..c {
        let g = DVector::from_fn(n, |i, _| img.get(i % w, i / w, ch));
        let u = lu.solve(&g).expect("system is positive definite");
        for i in 0..n {
            out[i * c + ch] = u[i].clamp(0.0, 1.0);
        }
    }
    out
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_grid_diff(a: &[Vec<f64>], b: &[f64]) -> f64 {
    let flat: Vec<f64> = a.iter().flatten().copied().collect();
    max_diff(&flat, b)
}

/// CIE Lab of an sRGB triple, D65 white taken as the matrix image of
/// sRGB white.
pub fn lab(rgb: [f64; 3]) -> [f64; 3] {
    const M: [[f64; 3]; 3] = [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ];
    let lin = rgb.map(srgb_linear);
    let t: Vec<f64> = M
        .iter()
        .map(|row| (row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2]) / (row[0] + row[1] + row[2]))
        .collect();
    let delta: f64 = 6.0 / 29.0;
    let f = |t: f64| {
        if t > delta.powi(3) {
            t.cbrt()
        } else {
            t / (3.0 * delta * delta) + 4.0 / 29.0
        }
    };
    let (fx, fy, fz) = (f(t[0]), f(t[1]), f(t[2]));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

fn lab_pixels(img: &ImageF) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for y in 0..img.height() {
        for x in 0..img.width() {
            out.push(lab(pixel_rgb(img, x, y)));
        }
    }
    out
}

/// Mean of L(J)/L(I) over pixels with L(I) >= 0.5, or 1 if there are none.
pub fn delta_l(i: &ImageF, j: &ImageF) -> f64 {
    let (li, lj) = (lab_pixels(i), lab_pixels(j));
    let mut sum = 0.0;
    let mut n = 0;
    for (a, b) in li.iter().zip(&lj) {
        if a[0] >= 0.5 {
            sum += b[0] / a[0];
            n += 1;
        }
    }
    if n == 0 {
        1.0
    } else {
        sum / n as f64
    }
}

/// Mean Euclidean (a, b) distance.
pub fn delta_c(i: &ImageF, j: &ImageF) -> f64 {
    let (li, lj) = (lab_pixels(i), lab_pixels(j));
    let sum: f64 = li
        .iter()
        .zip(&lj)
        .map(|(a, b)| ((a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt())
        .sum();
    sum / li.len() as f64
}

/// Global contrast factor: nine levels, 2x2 block averaging of `100 sqrt(Y)`
/// (partial blocks at odd borders), mean over pixels of the average absolute
/// difference to in-bounds 4-neighbors, Matkovic weights.
pub fn gcf(img: &ImageF) -> f64 {
    const ROW: [f64; 3] = [0.2126729, 0.7151522, 0.0721750];
    let (mut w, mut h) = img.dims();
    let mut grid: Vec<Vec<f64>> = (0..h)
        .map(|y| {
            (0..w)
                .map(|x| {
                    let lin = pixel_rgb(img, x, y).map(srgb_linear);
                    100.0 * (ROW[0] * lin[0] + ROW[1] * lin[1] + ROW[2] * lin[2]).sqrt()
                })
                .collect()
        })
        .collect();
    let mut total = 0.0;
    for i in 1..=9 {
        if i > 1 {
            let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
            grid = (0..nh)
                .map(|by| {
                    (0..nw)
                        .map(|bx| {
                            let cells: Vec<f64> = (2 * by..(2 * by + 2).min(h))
                                .flat_map(|y| (2 * bx..(2 * bx + 2).min(w)).map(move |x| (x, y)))
                                .map(|(x, y)| grid[y][x])
                                .collect();
                            cells.iter().sum::<f64>() / cells.len() as f64
                        })
                        .collect()
                })
                .collect();
            (w, h) = (nw, nh);
        }
        let mut c = 0.0;
        if w * h >= 2 {
            for y in 0..h {
                for x in 0..w {
                    let mut diffs = Vec::new();
                    for (dx, dy) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                            diffs.push((grid[y][x] - grid[ny as usize][nx as usize]).abs());
                        }
                    }
                    c += diffs.iter().sum::<f64>() / diffs.len() as f64;
                }
            }
            c /= (w * h) as f64;
        }
        let t = i as f64 / 9.0;
        total += ((-0.406385 * t + 0.334573) * t + 0.0877526) * c;
    }
    total
}

/// Sum of the gradient magnitudes of `j` over `mask` (all pixels if None)
/// divided by the same sum for `i`; 1 when the denominator vanishes.
pub fn so(i: &ImageF, j: &ImageF, mask: Option<&PixelMask>) -> f64 {
    let (gi, gj) = (gradient(i), gradient(j));
    let (mut num, mut den) = (0.0, 0.0);
    for y in 0..i.height() {
        for x in 0..i.width() {
            if mask.is_none_or(|m| m.get(x, y)) {
                num += gj[y][x];
                den += gi[y][x];
            }
        }
    }
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}
