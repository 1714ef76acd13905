//! sRGB <-> CIE Lab (D65).

use std::sync::LazyLock;

use super::{ImageF, Plane};

/// Linear sRGB to XYZ, D65.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

/// The reference white is the image of sRGB (1, 1, 1) under the matrix, so
/// neutral colors map to a = b = 0 without residue from rounded constants.
static WHITE: LazyLock<[f64; 3]> = LazyLock::new(|| {
    let row = |r: &[f64; 3]| r[0] + r[1] + r[2];
    [row(&RGB_TO_XYZ[0]), row(&RGB_TO_XYZ[1]), row(&RGB_TO_XYZ[2])]
});

static XYZ_TO_RGB: LazyLock<[[f64; 3]; 3]> = LazyLock::new(|| invert3(&RGB_TO_XYZ));

const EPSILON: f64 = 216.0 / 24389.0;
const KAPPA: f64 = 24389.0 / 27.0;

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let inv = 1.0 / det;
    [
        [
            (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv,
        ],
        [
            (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv,
        ],
        [
            (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv,
        ],
    ]
}

#[inline]
fn mul3(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

#[inline]
pub(crate) fn srgb_to_linear(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn linear_to_srgb(v: f64) -> f64 {
    if v <= 0.0031308 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    if t > EPSILON {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

#[inline]
fn lab_f_inv(f: f64) -> f64 {
    let t = f * f * f;
    if t > EPSILON {
        t
    } else {
        (116.0 * f - 16.0) / KAPPA
    }
}

/// Relative luminance Y of an sRGB triple.
#[inline]
pub(crate) fn srgb_to_y(rgb: [f64; 3]) -> f64 {
    let lin = rgb.map(srgb_to_linear);
    RGB_TO_XYZ[1][0] * lin[0] + RGB_TO_XYZ[1][1] * lin[1] + RGB_TO_XYZ[1][2] * lin[2]
}

pub fn srgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let xyz = mul3(&RGB_TO_XYZ, rgb.map(srgb_to_linear));
    let w = *WHITE;
    let fx = lab_f(xyz[0] / w[0]);
    let fy = lab_f(xyz[1] / w[1]);
    let fz = lab_f(xyz[2] / w[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Inverse of [`srgb_to_lab`]. The result is not clamped to the sRGB gamut.
pub fn lab_to_srgb(lab: [f64; 3]) -> [f64; 3] {
    let fy = (lab[0] + 16.0) / 116.0;
    let fx = fy + lab[1] / 500.0;
    let fz = fy - lab[2] / 200.0;
    let w = *WHITE;
    let y = if lab[0] > KAPPA * EPSILON {
        fy * fy * fy
    } else {
        lab[0] / KAPPA
    };
    let xyz = [lab_f_inv(fx) * w[0], y * w[1], lab_f_inv(fz) * w[2]];
    mul3(&XYZ_TO_RGB, xyz).map(linear_to_srgb)
}

/// Lab planes of an image. `l` is in [0, 100]; `a`, `b` are unbounded.
#[derive(Clone, Debug, PartialEq)]
pub struct LabImage {
    pub width: usize,
    pub height: usize,
    pub l: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Converts to Lab, treating 1-channel images as gray sRGB.
pub fn to_lab(img: &ImageF) -> LabImage {
    let n = img.pixel_count();
    let (mut l, mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let lab = srgb_to_lab(img.rgb(i));
        l.push(lab[0]);
        a.push(lab[1]);
        b.push(lab[2]);
    }
    LabImage {
        width: img.width(),
        height: img.height(),
        l,
        a,
        b,
    }
}

/// Converts Lab back to a 3-channel sRGB image, clamping out-of-gamut values.
pub fn from_lab(lab: &LabImage) -> ImageF {
    let mut data = Vec::with_capacity(lab.l.len() * 3);
    for i in 0..lab.l.len() {
        data.extend(lab_to_srgb([lab.l[i], lab.a[i], lab.b[i]]));
    }
    ImageF::from_clamped(lab.width, lab.height, 3, data).expect("lab planes have valid dims")
}

/// Lab lightness rescaled to [0, 1].
pub fn luminance(img: &ImageF) -> Plane {
    let data = (0..img.pixel_count())
        .map(|i| {
            let rgb = img.rgb(i);
            let y = srgb_to_y(rgb) / WHITE[1];
            (116.0 * lab_f(y) - 16.0) / 100.0
        })
        .collect();
    Plane::new(img.width(), img.height(), data)
}
