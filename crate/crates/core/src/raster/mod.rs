//! Raster types shared by every other module: the floating-point image
//! carrier, single-channel planes, pixel masks, plus I/O, color conversion,
//! gradients and morphology.

pub(crate) mod color;
mod gradient;
mod io;
mod morphology;

pub use color::{from_lab, lab_to_srgb, luminance, srgb_to_lab, to_lab, LabImage};
pub use gradient::{gradient_magnitude, plane_gradient_magnitude, GradientField};
pub use io::{decode_image, downscale_to_fit, encode_png, load_image, save_image};
pub use morphology::erode;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floating-point raster, row-major with interleaved channels.
///
/// Samples are finite and lie in `[0, 1]`. Constructors validate this, so
/// every `ImageF` in circulation satisfies it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageF {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageF {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "zero-sized image {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "unsupported channel count {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "data length {} does not match {width}x{height}x{channels}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !(v.is_finite() && (0.0..=1.0).contains(*v))) {
            return Err(Error::InvalidImage(format!(
                "sample {bad} is not a finite value in [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds an image from arbitrary samples, clamping into `[0, 1]`.
    /// Non-finite samples become 0.
    pub fn from_clamped(width: usize, height: usize, channels: usize, mut data: Vec<f64>) -> Result<Self> {
        for v in &mut data {
            *v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
        }
        Self::new(width, height, channels, data)
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    /// Builds an image by evaluating `f(x, y, channel)` for every sample.
    /// Values are clamped.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::from_clamped(width, height, channels, data)
    }

    /// Reassembles an image from per-channel planes, clamping samples.
    pub fn from_planes(planes: &[Plane]) -> Result<Self> {
        let first = planes
            .first()
            .ok_or_else(|| Error::InvalidImage("no planes".into()))?;
        let (w, h) = (first.width, first.height);
        if let Some(p) = planes.iter().find(|p| p.width != w || p.height != h) {
            return Err(Error::DimensionMismatch {
                expected: (w, h),
                actual: (p.width, p.height),
            });
        }
        let c = planes.len();
        let mut data = vec![0.0; w * h * c];
        for (ch, plane) in planes.iter().enumerate() {
            for (i, v) in plane.data.iter().enumerate() {
                data[i * c + ch] = *v;
            }
        }
        Self::from_clamped(w, h, c, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// RGB triple of a pixel; gray images are replicated.
    #[inline]
    pub fn rgb(&self, index: usize) -> [f64; 3] {
        if self.channels == 1 {
            let v = self.data[index];
            [v, v, v]
        } else {
            let i = index * 3;
            [self.data[i], self.data[i + 1], self.data[i + 2]]
        }
    }

    pub fn plane(&self, channel: usize) -> Plane {
        assert!(channel < self.channels, "channel {channel} out of range");
        let data = self
            .data
            .iter()
            .skip(channel)
            .step_by(self.channels)
            .copied()
            .collect();
        Plane {
            width: self.width,
            height: self.height,
            data,
        }
    }

    pub fn planes(&self) -> Vec<Plane> {
        (0..self.channels).map(|c| self.plane(c)).collect()
    }

    /// Applies `f` to every channel plane independently.
    pub fn map_planes(&self, mut f: impl FnMut(&Plane) -> Plane) -> Result<Self> {
        let planes: Vec<Plane> = self.planes().iter().map(&mut f).collect();
        Self::from_planes(&planes)
    }

    pub fn is_constant(&self) -> bool {
        let c = self.channels;
        self.data
            .chunks_exact(c)
            .all(|px| px == &self.data[..c])
    }

    pub fn ensure_same_dims(&self, other: &ImageF) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(())
    }

    /// Mirrors the image left to right.
    pub fn flip_horizontal(&self) -> Self {
        let c = self.channels;
        let mut data = Vec::with_capacity(self.data.len());
        for y in 0..self.height {
            for x in (0..self.width).rev() {
                let i = (y * self.width + x) * c;
                data.extend_from_slice(&self.data[i..i + c]);
            }
        }
        Self { data, ..self.clone() }
    }

    /// Gray image with the same dimensions, taken from the Lab lightness.
    pub fn to_gray(&self) -> Self {
        let lum = luminance(self);
        Self::from_clamped(self.width, self.height, 1, lum.data).expect("valid dims")
    }

    pub fn max_abs_diff(&self, other: &ImageF) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A single-channel floating-point grid. Values are unconstrained.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "plane data length");
        Self { width, height, data }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![0.0; width * height])
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn transpose(&self) -> Plane {
        let mut out = vec![0.0; self.data.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                out[x * self.height + y] = self.data[y * self.width + x];
            }
        }
        Plane::new(self.height, self.width, out)
    }
}

/// Boolean per-pixel set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl PixelMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height, "mask length");
        Self { width, height, bits }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![true; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn complement(&self) -> Self {
        Self::new(self.width, self.height, self.bits.iter().map(|b| !b).collect())
    }

    pub fn is_subset_of(&self, other: &PixelMask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }
}
