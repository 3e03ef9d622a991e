//! Image and mask buffers, pipeline configuration, and PNG I/O.
//!
//! All buffers are row-major with the origin at the top-left pixel. Channel
//! values live in `[0, 1]`; conversion to and from 8-bit storage uses
//! `v = byte / 255` on load and `byte = round_half_up(clamp(v) * 255)` on save.

use std::path::Path;

use image::{DynamicImage, ExtendedColorType, ImageFormat, ImageReader};

use crate::colorxfer::CovarianceMode;
use crate::error::{Error, Result};

/// Rec.601 luma weights for R, G, B.
pub const REC601: [f64; 3] = [0.299, 0.587, 0.114];

pub fn luma(rgb: [f64; 3]) -> f64 {
    REC601[0] * rgb[0] + REC601[1] * rgb[1] + REC601[2] * rgb[2]
}

/// Maps a unit-interval value to a byte: clamp, scale, round half up.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(())
}

fn check_unit(v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidValue(format!(
            "channel value {v} outside [0, 1]"
        )));
    }
    Ok(())
}

fn check_len(what: &'static str, width: usize, height: usize, per: usize, len: usize) -> Result<()> {
    if len != width * height * per {
        return Err(Error::InvalidValue(format!(
            "{what}: buffer length {len} does not match {width}x{height}x{per}"
        )));
    }
    Ok(())
}

/// An RGB image with channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRgb {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ImageRgb {
    /// Builds an image from interleaved `R, G, B` values.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        check_len("image", width, height, 3, data.len())?;
        for &v in &data {
            check_unit(v)?;
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::from_fn(width, height, |_, _| rgb)
    }

    /// Builds an image from interleaved 8-bit `R, G, B` bytes.
    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        check_dims(width, height)?;
        check_len("image", width, height, 3, bytes.len())?;
        Ok(Self {
            width,
            height,
            data: bytes.iter().map(|&b| f64::from(b) / 255.0).collect(),
        })
    }

    /// Clamps every value into `[0, 1]`; NaN maps to 0.
    pub(crate) fn from_unclamped(width: usize, height: usize, mut data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * 3);
        for v in &mut data {
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        }
        Self {
            width,
            height,
            data,
        }
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

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        self.pixel_at(y * self.width + x)
    }

    pub fn pixel_at(&self, index: usize) -> [f64; 3] {
        let p = &self.data[index * 3..index * 3 + 3];
        [p[0], p[1], p[2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }

    /// Quantized interleaved bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize(v)).collect()
    }

    /// Rec.601 grayscale, one value per pixel.
    pub fn to_luma(&self) -> Vec<f64> {
        self.pixels().map(luma).collect()
    }
}

/// Soft mask with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMask {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl AlphaMask {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        check_len("alpha mask", width, height, 1, data.len())?;
        for &v in &data {
            check_unit(v)?;
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        check_dims(width, height)?;
        Self::new(width, height, vec![value; width * height])
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize(v)).collect()
    }
}

/// Mask restricted to {0, 1}. `true` marks foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_dims(width, height)?;
        check_len("binary mask", width, height, 1, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        Self::from_fn(width, height, |_, _| value)
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

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dims() == other.dims()
            && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }

    /// Intersection over union; two empty masks score 1.
    pub fn iou(&self, other: &BinaryMask) -> f64 {
        let mut inter = 0usize;
        let mut union = 0usize;
        for (&a, &b) in self.data.iter().zip(&other.data) {
            inter += usize::from(a && b);
            union += usize::from(a || b);
        }
        if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        }
    }

    pub fn to_alpha(&self) -> AlphaMask {
        AlphaMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|&b| if b { 255 } else { 0 }).collect()
    }
}

/// Tunables for the full regional transfer pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Gaussian blur sigma applied before edge detection.
    pub canny_sigma: f64,
    /// Hysteresis low threshold, as a fraction of the maximum gradient magnitude.
    pub canny_low: f64,
    /// Hysteresis high threshold, as a fraction of the maximum gradient magnitude.
    pub canny_high: f64,
    /// Width in pixels of the alpha ramp inside the mask boundary.
    pub feather_radius: f64,
    /// Intensity at or above which a mask pixel is foreground.
    pub mask_threshold: f64,
    /// Maximum Euclidean depth below the original mask boundary at which
    /// refinement may remove pixels. `None` removes without limit.
    ///
    /// A single stray edge inside the mask can erode the whole mask when
    /// unlimited; a cap of a few pixels is recommended for noisy inputs.
    pub erosion_cap: Option<f64>,
    pub covariance: CovarianceMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            canny_sigma: 1.4,
            canny_low: 0.1,
            canny_high: 0.3,
            feather_radius: 4.0,
            mask_threshold: 0.5,
            erosion_cap: None,
            covariance: CovarianceMode::Centered,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.canny_sigma > 0.0 && self.canny_sigma.is_finite()) {
            return bad(format!("canny_sigma must be > 0, got {}", self.canny_sigma));
        }
        for (name, v) in [
            ("canny_low", self.canny_low),
            ("canny_high", self.canny_high),
            ("mask_threshold", self.mask_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if self.canny_low >= self.canny_high {
            return bad(format!(
                "canny_low ({}) must be below canny_high ({})",
                self.canny_low, self.canny_high
            ));
        }
        if !(self.feather_radius >= 0.0 && self.feather_radius.is_finite()) {
            return bad(format!(
                "feather_radius must be >= 0, got {}",
                self.feather_radius
            ));
        }
        if let Some(cap) = self.erosion_cap {
            if cap.is_nan() || cap < 0.0 {
                return bad(format!("erosion_cap must be >= 0, got {cap}"));
            }
        }
        Ok(())
    }
}

fn decode_png(path: &Path) -> Result<DynamicImage> {
    let reader = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    if reader.format() != Some(ImageFormat::Png) {
        return Err(Error::format(path, "not a PNG file"));
    }
    let img = reader.decode().map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::format(path, other.to_string()),
    })?;
    if img.width() == 0 || img.height() == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(img)
}

fn encode_png(path: &Path, bytes: &[u8], width: usize, height: usize, color: ExtendedColorType) -> Result<()> {
    let (w, h) = (
        u32::try_from(width).map_err(|_| Error::InvalidValue("width exceeds u32".into()))?,
        u32::try_from(height).map_err(|_| Error::InvalidValue("height exceeds u32".into()))?,
    );
    image::save_buffer_with_format(path, bytes, w, h, color, ImageFormat::Png).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::format(path, other.to_string()),
    })
}

/// Reads an 8-bit RGB or RGBA PNG. Alpha is discarded.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageRgb> {
    let path = path.as_ref();
    let img = decode_png(path)?;
    let rgb = match img {
        DynamicImage::ImageRgb8(buf) => buf,
        DynamicImage::ImageRgba8(_) => img.to_rgb8(),
        other => {
            return Err(Error::format(
                path,
                format!("unsupported color type {:?}; expected 8-bit RGB or RGBA", other.color()),
            ))
        }
    };
    ImageRgb::from_bytes(rgb.width() as usize, rgb.height() as usize, rgb.as_raw())
}

pub fn save_image(img: &ImageRgb, path: impl AsRef<Path>) -> Result<()> {
    encode_png(path.as_ref(), &img.to_bytes(), img.width, img.height, ExtendedColorType::Rgb8)
}

/// Per-pixel normalized intensity of an 8-bit gray or color PNG; color is
/// reduced with Rec.601 weights.
fn load_intensity(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let img = decode_png(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let values = match &img {
        DynamicImage::ImageLuma8(buf) => buf.as_raw().iter().map(|&b| f64::from(b) / 255.0).collect(),
        DynamicImage::ImageLumaA8(buf) => buf
            .as_raw()
            .chunks_exact(2)
            .map(|p| f64::from(p[0]) / 255.0)
            .collect(),
        DynamicImage::ImageRgb8(_) | DynamicImage::ImageRgba8(_) => img
            .to_rgb8()
            .as_raw()
            .chunks_exact(3)
            .map(|p| luma([p[0], p[1], p[2]].map(|b| f64::from(b) / 255.0)))
            .collect(),
        other => {
            return Err(Error::format(
                path,
                format!("unsupported color type {:?}; expected 8-bit gray or RGB", other.color()),
            ))
        }
    };
    Ok((w, h, values))
}

/// Reads a mask PNG; pixels with normalized intensity `>= threshold` are foreground.
pub fn load_mask(path: impl AsRef<Path>, threshold: f64) -> Result<BinaryMask> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidValue(format!(
            "mask threshold {threshold} outside [0, 1]"
        )));
    }
    let (w, h, values) = load_intensity(path.as_ref())?;
    BinaryMask::new(w, h, values.into_iter().map(|v| v >= threshold).collect())
}

/// Reads a soft alpha mask stored as 8-bit grayscale.
pub fn load_alpha(path: impl AsRef<Path>) -> Result<AlphaMask> {
    let (w, h, values) = load_intensity(path.as_ref())?;
    AlphaMask::new(w, h, values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

/// Writes a binary mask as 8-bit grayscale (0 / 255).
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    encode_png(path.as_ref(), &mask.to_bytes(), mask.width, mask.height, ExtendedColorType::L8)
}

/// Writes an alpha mask as 8-bit grayscale.
pub fn save_alpha(alpha: &AlphaMask, path: impl AsRef<Path>) -> Result<()> {
    encode_png(path.as_ref(), &alpha.to_bytes(), alpha.width, alpha.height, ExtendedColorType::L8)
}
