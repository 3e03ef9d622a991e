//! Foreground color transfer by principal-axis CDF matching in lαβ space.
//!
//! Each image is reduced to one scalar per pixel: the projection of its lαβ
//! vector onto the image's own first principal axis. A content pixel takes
//! the RGB of the style pixel that sits at the same cumulative rank of the
//! style projection.
//!
//! Discrete conventions:
//! - `F(v)` uses mid-rank averaging for ties: a value shared by the sorted
//!   positions `a..=b` (1-based) has `F = (a + b) / 2 / n`; a unique value at
//!   rank `k` has `F = k / n`.
//! - The rank of a content value is mapped linearly onto the style order
//!   statistics, so rank 1 meets the style minimum and rank `n` the maximum:
//!   `index = round_half_up((rank - 1) / (n_content - 1) * (n_style - 1))`.
//! - Style pixels with equal projections are ordered by row-major index.

use crate::colorspace::{rgb_to_lab, LabImage};
use crate::error::{Error, Result};
use crate::imgcore::{BinaryMask, ImageRgb};

/// How the 3x3 scatter matrix is formed before the eigensolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceMode {
    /// Covariance of mean-centered pixel vectors.
    #[default]
    Centered,
    /// Raw `XᵀX` without removing the mean.
    Uncentered,
}

const AXIS_EPS: f64 = 1e-12;

/// Unit eigenvector of the largest eigenvalue, sign-canonicalized so the
/// first component with magnitude above 1e-12 is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalAxis([f64; 3]);

impl PrincipalAxis {
    pub const DEFAULT: PrincipalAxis = PrincipalAxis([1.0, 0.0, 0.0]);

    /// Normalizes and canonicalizes `v`. Fails on a zero or non-finite vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidValue(format!("cannot normalize axis {v:?}")));
        }
        let mut q = v.map(|c| c / norm);
        if let Some(first) = q.iter().find(|c| c.abs() > AXIS_EPS) {
            if *first < 0.0 {
                q = q.map(|c| -c);
            }
        }
        Ok(Self(q))
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, v: [f64; 3]) -> f64 {
        self.0[0] * v[0] + self.0[1] * v[1] + self.0[2] * v[2]
    }
}

fn check_selection(what: &'static str, dims: (usize, usize), sel: Option<&BinaryMask>) -> Result<()> {
    if let Some(m) = sel {
        if m.dims() != dims {
            return Err(Error::DimensionMismatch {
                what,
                expected: dims,
                found: m.dims(),
            });
        }
    }
    Ok(())
}

fn selected_indices(n: usize, sel: Option<&BinaryMask>) -> Vec<usize> {
    match sel {
        None => (0..n).collect(),
        Some(m) => m
            .data()
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect(),
    }
}

/// Cyclic Jacobi eigensolver for a symmetric 3x3 matrix.
///
/// Returns eigenvalues and the matrix whose columns are the matching
/// unit eigenvectors.
pub fn symmetric_eigen3(mut a: [[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _sweep in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        let diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A <- Jᵀ A J
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Scatter matrix of the selected pixels, normalized by their count.
pub fn scatter_matrix(lab: &LabImage, indices: &[usize], mode: CovarianceMode) -> [[f64; 3]; 3] {
    let n = indices.len() as f64;
    let mut mean = [0.0; 3];
    if mode == CovarianceMode::Centered {
        for &i in indices {
            let p = lab.pixel_at(i);
            for c in 0..3 {
                mean[c] += p[c];
            }
        }
        mean = mean.map(|m| m / n);
    }
    let mut cov = [[0.0; 3]; 3];
    for &i in indices {
        let p = lab.pixel_at(i);
        let d = [p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]];
        for r in 0..3 {
            for c in r..3 {
                cov[r][c] += d[r] * d[c];
            }
        }
    }
    for r in 0..3 {
        for c in r..3 {
            cov[r][c] /= n;
            cov[c][r] = cov[r][c];
        }
    }
    cov
}

pub fn principal_axis(lab: &LabImage, selection: Option<&BinaryMask>) -> Result<PrincipalAxis> {
    principal_axis_with(lab, selection, CovarianceMode::Centered)
}

/// First principal axis of the selected pixels. Falls back to
/// [`PrincipalAxis::DEFAULT`] when every selected pixel equals the mean
/// (centered) or the origin (uncentered) within 1e-12.
pub fn principal_axis_with(
    lab: &LabImage,
    selection: Option<&BinaryMask>,
    mode: CovarianceMode,
) -> Result<PrincipalAxis> {
    check_selection("selection mask", lab.dims(), selection)?;
    let indices = selected_indices(lab.pixel_count(), selection);
    if indices.is_empty() {
        return Err(Error::EmptySelection("no pixels selected for principal axis"));
    }
    let cov = scatter_matrix(lab, &indices, mode);

    let reference = match mode {
        CovarianceMode::Centered => {
            let mut mean = [0.0; 3];
            for &i in &indices {
                let p = lab.pixel_at(i);
                (0..3).for_each(|c| mean[c] += p[c]);
            }
            mean.map(|m| m / indices.len() as f64)
        }
        CovarianceMode::Uncentered => [0.0; 3],
    };
    let degenerate = indices.iter().all(|&i| {
        let p = lab.pixel_at(i);
        (0..3).all(|c| (p[c] - reference[c]).abs() <= AXIS_EPS)
    });
    if degenerate {
        return Ok(PrincipalAxis::DEFAULT);
    }

    let (values, vectors) = symmetric_eigen3(cov);
    let mut best = 0;
    for k in 1..3 {
        if values[k] > values[best] {
            best = k;
        }
    }
    PrincipalAxis::from_vector([vectors[0][best], vectors[1][best], vectors[2][best]])
}

/// Dot product of each selected pixel with `q`, in row-major order.
pub fn project(lab: &LabImage, q: &PrincipalAxis, selection: Option<&BinaryMask>) -> Result<Vec<f64>> {
    check_selection("selection mask", lab.dims(), selection)?;
    Ok(selected_indices(lab.pixel_count(), selection)
        .into_iter()
        .map(|i| q.dot(lab.pixel_at(i)))
        .collect())
}

/// Empirical distribution of projected values.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    samples: Vec<f64>,
}

pub fn build_cdf(values: &[f64]) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(values.to_vec())
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySelection("cannot build a CDF from no samples"));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidValue("NaN sample in CDF input".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `(count < v, count == v)`.
    fn counts(&self, v: f64) -> (usize, usize) {
        let less = self.samples.partition_point(|&s| s < v);
        let leq = self.samples.partition_point(|&s| s <= v);
        (less, leq - less)
    }

    pub fn cdf(&self, v: f64) -> f64 {
        let n = self.samples.len() as f64;
        let (less, eq) = self.counts(v);
        if eq == 0 {
            less as f64 / n
        } else {
            (less as f64 + (eq as f64 + 1.0) / 2.0) / n
        }
    }

    /// Index into a sorted sequence of length `target_len` that holds the
    /// same cumulative rank as `v` holds here.
    ///
    /// Exact integer arithmetic; rounds half up.
    pub fn matching_index(&self, v: f64, target_len: usize) -> usize {
        assert!(target_len > 0);
        let n = self.samples.len() as u128;
        let (less, eq) = self.counts(v);
        let span = (target_len - 1) as u128;
        if n == 1 {
            // a single sample sits at the median
            return span.div_ceil(2) as usize;
        }
        // zero-based mid rank, doubled: 2 * less + (eq - 1), eq >= 1 for samples
        let twice_rank = 2 * less as u128 + (eq.max(1) as u128 - 1);
        let num = twice_rank * span;
        let den = 2 * (n - 1);
        let index = (2 * num + den) / (2 * den);
        index.min(span) as usize
    }
}

/// Style pixel indices ordered by projection, ties by row-major index.
fn sorted_order(projections: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..projections.len()).collect();
    order.sort_by(|&a, &b| projections[a].total_cmp(&projections[b]).then(a.cmp(&b)));
    order
}

/// One content pixel paired with the style pixel it copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelMatch {
    pub content: usize,
    pub style: usize,
}

/// Pairs every selected content pixel with a style pixel by CDF matching.
///
/// The content axis and CDF use only selected content pixels; the style
/// side always uses the whole style image.
pub fn match_pixels(
    content: &LabImage,
    style: &LabImage,
    selection: Option<&BinaryMask>,
    mode: CovarianceMode,
) -> Result<Vec<PixelMatch>> {
    check_selection("selection mask", content.dims(), selection)?;
    let content_idx = selected_indices(content.pixel_count(), selection);
    if content_idx.is_empty() {
        return Err(Error::EmptySelection("no content pixels selected"));
    }
    let q_content = principal_axis_with(content, selection, mode)?;
    let q_style = principal_axis_with(style, None, mode)?;

    let content_proj = project(content, &q_content, selection)?;
    let style_proj = project(style, &q_style, None)?;
    let content_cdf = EmpiricalCdf::new(content_proj.clone())?;
    let style_order = sorted_order(&style_proj);

    Ok(content_idx
        .iter()
        .zip(&content_proj)
        .map(|(&ci, &p)| PixelMatch {
            content: ci,
            style: style_order[content_cdf.matching_index(p, style_order.len())],
        })
        .collect())
}

pub fn transfer_colors(
    content: &ImageRgb,
    style: &ImageRgb,
    selection: Option<&BinaryMask>,
) -> Result<ImageRgb> {
    transfer_colors_with(content, style, selection, CovarianceMode::Centered)
}

/// Replaces each selected content pixel with its matched style pixel's RGB.
/// Unselected pixels pass through unchanged.
pub fn transfer_colors_with(
    content: &ImageRgb,
    style: &ImageRgb,
    selection: Option<&BinaryMask>,
    mode: CovarianceMode,
) -> Result<ImageRgb> {
    let matches = match_pixels(&rgb_to_lab(content), &rgb_to_lab(style), selection, mode)?;
    let mut data = content.data().to_vec();
    for m in matches {
        data[m.content * 3..m.content * 3 + 3].copy_from_slice(&style.pixel_at(m.style));
    }
    ImageRgb::new(content.width(), content.height(), data)
}
