//! Weighted-least-squares smoothing.
//!
//! Solves `(I + lambda * A) u = g` per channel, where `A` is the
//! inhomogeneous 5-point Laplacian whose edge weights are
//! `(|d log L|^alpha + eps)^-1` on the log-luminance of the input.

use crate::error::{Error, Result};
use crate::raster::{luminance, ImageF, Plane};

pub(crate) const DEFAULT_ALPHA: f64 = 1.2;
pub(crate) const DEFAULT_EPS: f64 = 1e-4;
/// Offset inside the logarithm so black pixels stay finite.
const LOG_OFFSET: f64 = 1e-4;
pub(crate) const RESIDUAL_TOL: f64 = 1e-6;

/// The sparse system `I + lambda * A`, stored as the coupling weight of each
/// pixel to its right and lower neighbor (already scaled by lambda).
#[derive(Clone, Debug)]
pub(crate) struct WlsSystem {
    pub width: usize,
    pub height: usize,
    pub right: Vec<f64>,
    pub down: Vec<f64>,
    diag: Vec<f64>,
}

impl WlsSystem {
    pub fn new(guide: &Plane, lambda: f64, alpha: f64, eps: f64) -> Self {
        let (w, h) = (guide.width, guide.height);
        let log: Vec<f64> = guide.data.iter().map(|v| (v + LOG_OFFSET).ln()).collect();
        let weight = |d: f64| lambda / (d.abs().powf(alpha) + eps);
        let mut right = vec![0.0; w * h];
        let mut down = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if x + 1 < w {
                    right[i] = weight(log[i + 1] - log[i]);
                }
                if y + 1 < h {
                    down[i] = weight(log[i + w] - log[i]);
                }
            }
        }
        let mut diag = vec![1.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if x + 1 < w {
                    diag[i] += right[i];
                    diag[i + 1] += right[i];
                }
                if y + 1 < h {
                    diag[i] += down[i];
                    diag[i + w] += down[i];
                }
            }
        }
        Self {
            width: w,
            height: h,
            right,
            down,
            diag,
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        let w = self.width;
        for (o, (d, v)) in out.iter_mut().zip(self.diag.iter().zip(x)) {
            *o = d * v;
        }
        for y in 0..self.height {
            for xx in 0..w {
                let i = y * w + xx;
                if xx + 1 < w {
                    let c = self.right[i];
                    out[i] -= c * x[i + 1];
                    out[i + 1] -= c * x[i];
                }
                if y + 1 < self.height {
                    let c = self.down[i];
                    out[i] -= c * x[i + w];
                    out[i + w] -= c * x[i];
                }
            }
        }
    }

    fn residual(&self, x: &[f64], b: &[f64], r: &mut [f64]) -> f64 {
        self.mul(x, r);
        let mut max = 0.0f64;
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
            max = max.max(ri.abs());
        }
        max
    }

    /// Jacobi-preconditioned conjugate gradients started from `b`.
    /// Converges when the true residual max-norm is at most `tol`.
    pub fn solve(&self, b: &[f64], tol: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let cap = 10 * n.max(1);
        let mut x = b.to_vec();
        let mut r = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        let mut iterations = 0;
        let mut true_res = self.residual(&x, b, &mut r);
        while true_res > tol {
            // (Re)start from the current true residual.
            for i in 0..n {
                z[i] = r[i] / self.diag[i];
            }
            p.copy_from_slice(&z);
            let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            loop {
                if iterations >= cap {
                    return Err(Error::SolverDiverged {
                        iterations,
                        residual: self.residual(&x, b, &mut r),
                    });
                }
                iterations += 1;
                self.mul(&p, &mut q);
                let pq: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
                if pq <= 0.0 {
                    break;
                }
                let step = rz / pq;
                let mut rmax = 0.0f64;
                for i in 0..n {
                    x[i] += step * p[i];
                    r[i] -= step * q[i];
                    rmax = rmax.max(r[i].abs());
                }
                if rmax <= 0.25 * tol {
                    break;
                }
                for i in 0..n {
                    z[i] = r[i] / self.diag[i];
                }
                let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
                let beta = rz_next / rz;
                rz = rz_next;
                for i in 0..n {
                    p[i] = z[i] + beta * p[i];
                }
            }
            true_res = self.residual(&x, b, &mut r);
        }
        Ok(x)
    }
}

/// Weighted-least-squares edge-preserving smoothing.
pub fn wls_smooth(img: &ImageF, lambda: f64, alpha: f64, eps: f64) -> Result<ImageF> {
    if lambda <= 0.0 {
        return Ok(img.clone());
    }
    let system = WlsSystem::new(&luminance(img), lambda, alpha, eps);
    let mut planes = Vec::with_capacity(img.channels());
    for p in img.planes() {
        let u = system.solve(&p.data, RESIDUAL_TOL)?;
        planes.push(Plane::new(p.width, p.height, u));
    }
    ImageF::from_planes(&planes)
}
