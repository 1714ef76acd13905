use crate::error::Result;
use crate::raster::{ImageF, Plane};

pub(crate) const DEFAULT_EPS: f64 = 0.01;

/// Mean over the `(2r+1)^2` window clipped to the image, via a summed-area
/// table.
fn box_mean(plane: &Plane, r: usize) -> Plane {
    let (w, h) = (plane.width, plane.height);
    let stride = w + 1;
    let mut sat = vec![0.0; stride * (h + 1)];
    for y in 0..h {
        let mut run = 0.0;
        for x in 0..w {
            run += plane.data[y * w + x];
            sat[(y + 1) * stride + x + 1] = sat[y * stride + x + 1] + run;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let (y0, y1) = (y.saturating_sub(r), (y + r + 1).min(h));
        for x in 0..w {
            let (x0, x1) = (x.saturating_sub(r), (x + r + 1).min(w));
            let sum = sat[y1 * stride + x1] - sat[y0 * stride + x1] - sat[y1 * stride + x0] + sat[y0 * stride + x0];
            out[y * w + x] = sum / ((y1 - y0) * (x1 - x0)) as f64;
        }
    }
    Plane::new(w, h, out)
}

fn guided_plane(p: &Plane, r: usize, eps: f64) -> Plane {
    let (w, h) = (p.width, p.height);
    let mean = box_mean(p, r);
    let sq = Plane::new(w, h, p.data.iter().map(|v| v * v).collect());
    let mean_sq = box_mean(&sq, r);
    let mut a = vec![0.0; w * h];
    let mut b = vec![0.0; w * h];
    for i in 0..w * h {
        let var = mean_sq.data[i] - mean.data[i] * mean.data[i];
        a[i] = var / (var + eps);
        b[i] = mean.data[i] - a[i] * mean.data[i];
    }
    let mean_a = box_mean(&Plane::new(w, h, a), r);
    let mean_b = box_mean(&Plane::new(w, h, b), r);
    Plane::new(
        w,
        h,
        (0..w * h)
            .map(|i| mean_a.data[i] * p.data[i] + mean_b.data[i])
            .collect(),
    )
}

/// Guided filter with each channel serving as its own guide.
pub fn guided_filter(img: &ImageF, radius: usize, eps: f64) -> Result<ImageF> {
    if radius == 0 {
        return Ok(img.clone());
    }
    img.map_planes(|p| guided_plane(p, radius, eps))
}
