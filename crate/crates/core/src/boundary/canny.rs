use std::collections::VecDeque;

use super::EdgeMap;
use crate::error::Result;
use crate::imgcore::{ImageRgb, PipelineConfig};

/// Gradient magnitudes at or below this are treated as zero.
const FLAT: f64 = 1e-9;
/// Neighboring magnitudes closer than this fraction of the maximum compare
/// as equal during non-maximum suppression.
const TIE_TOLERANCE: f64 = 1e-9;

/// Canny edge detection on the Rec.601 luma of `img`.
///
/// Gaussian blur, Sobel gradients, non-maximum suppression along one of four
/// quantized directions, then hysteresis. Thresholds are fractions of the
/// largest gradient magnitude in the image. Borders replicate the outermost
/// pixel.
pub fn canny_edges(img: &ImageRgb, cfg: &PipelineConfig) -> Result<EdgeMap> {
    cfg.validate()?;
    let (w, h) = img.dims();
    let blurred = gaussian_blur(&img.to_luma(), w, h, cfg.canny_sigma);
    let (gx, gy) = sobel(&blurred, w, h);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();

    let max = mag.iter().copied().fold(0.0, f64::max);
    if max <= FLAT {
        return Ok(EdgeMap::empty(w, h));
    }
    let thin = non_max_suppression(&mag, &gx, &gy, w, h, max * TIE_TOLERANCE);
    let high = (cfg.canny_high * max).max(FLAT);
    let low = (cfg.canny_low * max).max(FLAT);
    Ok(EdgeMap::from_vec(w, h, hysteresis(&thin, w, h, low, high)))
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

fn clamp_index(i: i64, n: usize) -> usize {
    i.clamp(0, n as i64 - 1) as usize
}

/// Separable Gaussian blur with replicated borders.
pub fn gaussian_blur(src: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as i64;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, kv) in k.iter().enumerate() {
                let sx = clamp_index(x as i64 + j as i64 - r, w);
                acc += kv * src[y * w + sx];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, kv) in k.iter().enumerate() {
                let sy = clamp_index(y as i64 + j as i64 - r, h);
                acc += kv * tmp[sy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Horizontal and vertical Sobel responses, y pointing down.
pub fn sobel(src: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |x: i64, y: i64| src[clamp_index(y, h) * w + clamp_index(x, w)];
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            gx[i] = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            gy[i] = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
        }
    }
    (gx, gy)
}

/// Unit step along the quantized gradient direction.
fn direction_step(gx: f64, gy: f64) -> (i64, i64) {
    let mut angle = gy.atan2(gx).to_degrees();
    if angle < 0.0 {
        angle += 180.0;
    }
    if !(22.5..157.5).contains(&angle) {
        (1, 0)
    } else if angle < 67.5 {
        (1, 1)
    } else if angle < 112.5 {
        (0, 1)
    } else {
        (-1, 1)
    }
}

/// Keeps a pixel when it is at least as strong as its forward neighbor and
/// strictly stronger than its backward neighbor along the gradient, so a
/// symmetric two-pixel ridge thins to one pixel. Differences within `tol`
/// count as ties.
fn non_max_suppression(mag: &[f64], gx: &[f64], gy: &[f64], w: usize, h: usize, tol: f64) -> Vec<f64> {
    let get = |x: i64, y: i64| {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = mag[i];
            if m <= FLAT {
                continue;
            }
            let (dx, dy) = direction_step(gx[i], gy[i]);
            let (xi, yi) = (x as i64, y as i64);
            if m >= get(xi + dx, yi + dy) - tol && m > get(xi - dx, yi - dy) + tol {
                out[i] = m;
            }
        }
    }
    out
}

/// Grows strong pixels through 8-connected weak pixels.
fn hysteresis(thin: &[f64], w: usize, h: usize, low: f64, high: f64) -> Vec<bool> {
    let mut edge = vec![false; w * h];
    let mut queue = VecDeque::new();
    for (i, &m) in thin.iter().enumerate() {
        if m >= high {
            edge[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !edge[j] && thin[j] >= low {
                    edge[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    edge
}
