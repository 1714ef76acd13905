use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat, ImageReader};

use super::ImageF;
use crate::error::{Error, Result};

/// Loads a PNG or JPEG file. Gray sources (with or without alpha) yield one
/// channel, color sources three; alpha is dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageF> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    decode_with_path(&bytes, path)
}

/// Decodes PNG or JPEG bytes held in memory.
pub fn decode_image(bytes: &[u8]) -> Result<ImageF> {
    decode_with_path(bytes, Path::new("<memory>"))
}

fn decode_with_path(bytes: &[u8], path: &Path) -> Result<ImageF> {
    let reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::Decode {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Jpeg) => {}
        Some(other) => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                message: format!("{other:?}"),
            })
        }
        None => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                message: "unrecognized file signature".into(),
            })
        }
    }
    let decoded = reader.decode().map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    from_dynamic(decoded, path)
}

fn from_dynamic(img: DynamicImage, path: &Path) -> Result<ImageF> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err(Error::EmptyImage {
            path: path.to_path_buf(),
        });
    }
    let (channels, data): (usize, Vec<f64>) = match img {
        DynamicImage::ImageLuma8(buf) => (1, norm8(buf.as_raw())),
        DynamicImage::ImageLumaA8(_) => (1, norm8(img.to_luma8().as_raw())),
        DynamicImage::ImageLuma16(buf) => (1, norm16(buf.as_raw())),
        DynamicImage::ImageLumaA16(_) => (1, norm16(img.to_luma16().as_raw())),
        DynamicImage::ImageRgb8(buf) => (3, norm8(buf.as_raw())),
        DynamicImage::ImageRgba8(_) => (3, norm8(img.to_rgb8().as_raw())),
        DynamicImage::ImageRgb16(buf) => (3, norm16(buf.as_raw())),
        DynamicImage::ImageRgba16(_) => (3, norm16(img.to_rgb16().as_raw())),
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                message: format!("sample layout {:?}", other.color()),
            })
        }
    };
    ImageF::new(w, h, channels, data)
}

fn norm8(raw: &[u8]) -> Vec<f64> {
    raw.iter().map(|v| *v as f64 / 255.0).collect()
}

fn norm16(raw: &[u16]) -> Vec<f64> {
    raw.iter().map(|v| *v as f64 / 65535.0).collect()
}

fn to_dynamic(img: &ImageF) -> DynamicImage {
    let bytes: Vec<u8> = img
        .data()
        .iter()
        .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    let (w, h) = (img.width() as u32, img.height() as u32);
    if img.channels() == 1 {
        DynamicImage::ImageLuma8(image::GrayImage::from_raw(w, h, bytes).expect("buffer size"))
    } else {
        DynamicImage::ImageRgb8(image::RgbImage::from_raw(w, h, bytes).expect("buffer size"))
    }
}

/// Encodes as an 8-bit PNG.
pub fn encode_png(img: &ImageF) -> Result<Vec<u8>> {
    let mut out = Cursor::new(Vec::new());
    to_dynamic(img)
        .write_to(&mut out, ImageFormat::Png)
        .map_err(|e| Error::Write {
            path: "<memory>".into(),
            message: e.to_string(),
        })?;
    Ok(out.into_inner())
}

/// Saves an 8-bit image; the format follows the file extension (PNG by
/// default).
pub fn save_image(img: &ImageF, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = ImageFormat::from_path(path)
        .ok()
        .filter(|f| matches!(f, ImageFormat::Png | ImageFormat::Jpeg))
        .unwrap_or(ImageFormat::Png);
    to_dynamic(img)
        .save_with_format(path, format)
        .map_err(|e| Error::Write {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

/// Shrinks `img` so that its longer side is at most `max_side`, with a
/// triangle (linear) filter. Returns the image and the applied scale
/// factor (1 when no resizing was needed).
pub fn downscale_to_fit(img: &ImageF, max_side: usize) -> (ImageF, f64) {
    let (w, h) = img.dims();
    let long = w.max(h);
    if long <= max_side || max_side == 0 {
        return (img.clone(), 1.0);
    }
    let scale = max_side as f64 / long as f64;
    let nw = ((w as f64 * scale).round() as u32).max(1);
    let nh = ((h as f64 * scale).round() as u32).max(1);
    let samples: Vec<f32> = img.data().iter().map(|v| *v as f32).collect();
    let filter = image::imageops::FilterType::Triangle;
    let resized: Vec<f32> = if img.channels() == 1 {
        let buf = image::ImageBuffer::<image::Luma<f32>, _>::from_raw(w as u32, h as u32, samples).expect("buffer size");
        image::imageops::resize(&buf, nw, nh, filter).into_raw()
    } else {
        let buf = image::Rgb32FImage::from_raw(w as u32, h as u32, samples).expect("buffer size");
        image::imageops::resize(&buf, nw, nh, filter).into_raw()
    };
    let data = resized.into_iter().map(f64::from).collect();
    let out = ImageF::from_clamped(nw as usize, nh as usize, img.channels(), data).expect("valid dims");
    (out, scale)
}
