//! Mask boundary optimization: edge extraction, nearest-edge queries, BFS
//! erosion of the mask toward image edges, and distance-based feathering.

mod canny;
pub mod distance;
mod refine;

pub use canny::{canny_edges, gaussian_blur, sobel};
pub use refine::{feather_mask, interior_distance, refine_mask};

use crate::error::{Error, Result};

/// Per-pixel edge flags, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl EdgeMap {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension);
        }
        if data.len() != width * height {
            return Err(Error::InvalidValue(format!(
                "edge map: buffer length {} does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self::from_vec(width, height, data))
    }

    pub fn from_points(width: usize, height: usize, points: &[(usize, usize)]) -> Result<Self> {
        let mut data = vec![false; width * height];
        for &(x, y) in points {
            if x >= width || y >= height {
                return Err(Error::InvalidValue(format!(
                    "edge point ({x}, {y}) outside {width}x{height}"
                )));
            }
            data[y * width + x] = true;
        }
        Self::new(width, height, data)
    }

    pub(crate) fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Self {
        Self {
            width,
            height,
            data,
        }
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self::from_vec(width, height, vec![false; width * height])
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
        self.data.iter().filter(|&&e| e).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&e| e)
    }

    /// Edge pixels as 255 on a 0 background.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|&e| if e { 255 } else { 0 }).collect()
    }
}

/// For every pixel, the `(x, y)` of the Euclidean-nearest edge pixel.
///
/// Equidistant edge pixels resolve to the smaller row, then the smaller
/// column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearestEdgeField {
    width: usize,
    height: usize,
    data: Vec<Option<(usize, usize)>>,
}

impl NearestEdgeField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `None` when the edge map has no edges.
    pub fn nearest(&self, x: usize, y: usize) -> Option<(usize, usize)> {
        self.data[y * self.width + x]
    }

    pub fn nearest_at(&self, index: usize) -> Option<(usize, usize)> {
        self.data[index]
    }

    pub fn data(&self) -> &[Option<(usize, usize)>] {
        &self.data
    }
}

pub fn nearest_edge_field(edges: &EdgeMap) -> NearestEdgeField {
    let sites = distance::nearest_sites(edges.width, edges.height, &edges.data);
    NearestEdgeField {
        width: edges.width,
        height: edges.height,
        data: sites.into_iter().map(|s| s.map(|(row, col)| (col, row))).collect(),
    }
}
