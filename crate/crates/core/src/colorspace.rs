//! RGB <-> lαβ conversion through the LMS cone space.
//!
//! Stored pixel values are used directly (no gamma linearization). LMS
//! components are floored at [`LMS_FLOOR`] before the base-10 logarithm so
//! black pixels stay finite.

use crate::error::{Error, Result};
use crate::imgcore::ImageRgb;

/// RGB -> LMS.
pub const RGB_TO_LMS: [[f64; 3]; 3] = [
    [0.3811, 0.5783, 0.0402],
    [0.1967, 0.7244, 0.0782],
    [0.0241, 0.1288, 0.8444],
];

/// Exact inverse of [`RGB_TO_LMS`], rounded once to double precision.
pub const LMS_TO_RGB: [[f64; 3]; 3] = [
    [4.468669863496255, -3.5886759034721263, 0.11960436657860116],
    [-1.2197166276177633, 2.3830879129554567, -0.16263011175140057],
    [0.0585084769385459, -0.26107843902769373, 1.205665908525623],
];

pub const LMS_FLOOR: f64 = 1e-5;

const INV_SQRT3: f64 = 0.577_350_269_189_625_8;
const INV_SQRT6: f64 = 0.408_248_290_463_863_1;
const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// LMS cone response of one pixel, before flooring and logarithm.
pub fn rgb_to_lms(rgb: [f64; 3]) -> [f64; 3] {
    mat_vec(&RGB_TO_LMS, rgb)
}

/// Decorrelating rotation of log-LMS into (l, α, β).
pub fn log_lms_to_lab(log: [f64; 3]) -> [f64; 3] {
    let [ll, lm, ls] = log;
    [
        INV_SQRT3 * (ll + lm + ls),
        INV_SQRT6 * (ll + lm - 2.0 * ls),
        INV_SQRT2 * (ll - lm),
    ]
}

/// Inverse of [`log_lms_to_lab`]: the rotation's transpose with the row
/// scales folded in.
pub fn lab_to_log_lms(lab: [f64; 3]) -> [f64; 3] {
    let a = lab[0] * INV_SQRT3;
    let b = lab[1] * INV_SQRT6;
    let c = lab[2] * INV_SQRT2;
    [a + b + c, a + b - c, a - 2.0 * b]
}

pub fn rgb_pixel_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let lms = rgb_to_lms(rgb);
    log_lms_to_lab(lms.map(|v| v.max(LMS_FLOOR).log10()))
}

/// Unclamped inverse; the result can leave `[0, 1]`.
pub fn lab_pixel_to_rgb(lab: [f64; 3]) -> [f64; 3] {
    let lms = lab_to_log_lms(lab).map(|v| 10f64.powf(v));
    mat_vec(&LMS_TO_RGB, lms)
}

/// Image in lαβ coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl LabImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension);
        }
        if data.len() != width * height * 3 {
            return Err(Error::InvalidValue(format!(
                "lab image: buffer length {} does not match {width}x{height}x3",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!("non-finite lab component {v}")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_pixels(width: usize, height: usize, pixels: &[[f64; 3]]) -> Result<Self> {
        Self::new(width, height, pixels.iter().flatten().copied().collect())
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

    pub fn pixel_at(&self, index: usize) -> [f64; 3] {
        let p = &self.data[index * 3..index * 3 + 3];
        [p[0], p[1], p[2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }

    /// Multiplies every component by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }
}

pub fn rgb_to_lab(img: &ImageRgb) -> LabImage {
    let data = img.pixels().flat_map(rgb_pixel_to_lab).collect();
    LabImage {
        width: img.width(),
        height: img.height(),
        data,
    }
}

/// Inverse conversion; out-of-gamut channels are clamped to `[0, 1]`.
pub fn lab_to_rgb(lab: &LabImage) -> ImageRgb {
    let data = lab.pixels().flat_map(lab_pixel_to_rgb).collect();
    ImageRgb::from_unclamped(lab.width, lab.height, data)
}
