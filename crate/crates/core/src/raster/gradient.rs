use super::{luminance, ImageF, Plane};

/// Per-pixel gradient magnitude.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    plane: Plane,
}

impl GradientField {
    pub fn width(&self) -> usize {
        self.plane.width
    }

    pub fn height(&self) -> usize {
        self.plane.height
    }

    pub fn mag(&self) -> &[f64] {
        &self.plane.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.plane.get(x, y)
    }

    pub fn into_plane(self) -> Plane {
        self.plane
    }
}

/// Gradient magnitude of the luminance plane (Lab L / 100), using forward
/// differences with a replicated boundary.
pub fn gradient_magnitude(img: &ImageF) -> GradientField {
    plane_gradient_magnitude(&luminance(img))
}

/// Forward-difference gradient magnitude of an arbitrary plane.
pub fn plane_gradient_magnitude(plane: &Plane) -> GradientField {
    let (w, h) = (plane.width, plane.height);
    let d = &plane.data;
    let mut mag = Vec::with_capacity(w * h);
    for y in 0..h {
        let row = y * w;
        let below = if y + 1 < h { row + w } else { row };
        for x in 0..w {
            let i = row + x;
            let gx = if x + 1 < w { d[i + 1] - d[i] } else { 0.0 };
            let gy = d[below + x] - d[i];
            mag.push((gx * gx + gy * gy).sqrt());
        }
    }
    GradientField {
        plane: Plane::new(w, h, mag),
    }
}
