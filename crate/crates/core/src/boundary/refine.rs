use std::collections::VecDeque;

use super::distance::{dist2, nearest_sites};
use super::{nearest_edge_field, EdgeMap};
use crate::error::{Error, Result};
use crate::imgcore::{AlphaMask, BinaryMask, PipelineConfig};

const NEIGHBORS: [(i64, i64); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

fn neighbors(i: usize, w: usize, h: usize) -> impl Iterator<Item = Option<usize>> {
    let (x, y) = ((i % w) as i64, (i / w) as i64);
    NEIGHBORS.iter().map(move |&(dx, dy)| {
        let (nx, ny) = (x + dx, y + dy);
        (nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64).then(|| ny as usize * w + nx as usize)
    })
}

/// Euclidean distance from each mask pixel to the nearest non-mask pixel;
/// 0 outside the mask, infinite when the mask covers the whole image.
pub fn interior_distance(mask: &BinaryMask) -> Vec<f64> {
    let (w, h) = mask.dims();
    let outside: Vec<bool> = mask.data().iter().map(|&m| !m).collect();
    nearest_sites(w, h, &outside)
        .into_iter()
        .enumerate()
        .map(|(i, site)| match (mask.data()[i], site) {
            (false, _) => 0.0,
            (true, Some(s)) => (dist2((i / w, i % w), s) as f64).sqrt(),
            (true, None) => f64::INFINITY,
        })
        .collect()
}

/// Like [`interior_distance`] but with the ring of pixels just beyond the
/// image border counted as outside the mask.
fn depth_below_boundary(mask: &BinaryMask) -> Vec<f64> {
    let (w, h) = mask.dims();
    let (pw, ph) = (w + 2, h + 2);
    let mut outside = vec![true; pw * ph];
    for y in 0..h {
        for x in 0..w {
            outside[(y + 1) * pw + x + 1] = !mask.get(x, y);
        }
    }
    let sites = nearest_sites(pw, ph, &outside);
    let mut depth = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                let s = sites[(y + 1) * pw + x + 1].expect("padding guarantees a site");
                depth[y * w + x] = (dist2((y + 1, x + 1), s) as f64).sqrt();
            }
        }
    }
    depth
}

/// Erodes `mask` toward image edges by breadth-first traversal from its
/// periphery.
///
/// The queue is seeded, in row-major order, with every mask pixel that has a
/// 4-neighbor outside the mask or outside the image. A dequeued pixel whose
/// nearest edge pixel lies inside the original mask is removed, and its
/// unvisited 4-neighbors in the mask are queued; edge pixels are removed
/// but do not queue their neighbors, so a closed edge contour stops the
/// traversal. A pixel whose nearest edge lies outside the original mask is
/// kept and the traversal does not pass through it.
///
/// `cfg.erosion_cap`, when set, keeps every pixel deeper than the cap below
/// the original boundary. The result is always a subset of `mask`.
pub fn refine_mask(mask: &BinaryMask, edges: &EdgeMap, cfg: &PipelineConfig) -> Result<BinaryMask> {
    if mask.dims() != edges.dims() {
        return Err(Error::DimensionMismatch {
            what: "edge map vs mask",
            expected: mask.dims(),
            found: edges.dims(),
        });
    }
    if edges.is_empty() {
        return Ok(mask.clone());
    }
    let (w, h) = mask.dims();
    let original = mask.data();
    let field = nearest_edge_field(edges);
    let depth = cfg.erosion_cap.map(|_| depth_below_boundary(mask));
    let removable = |i: usize| match (&depth, cfg.erosion_cap) {
        (Some(d), Some(cap)) => d[i] <= cap,
        _ => true,
    };

    let mut out = original.to_vec();
    let mut visited = vec![false; w * h];
    let mut queue: VecDeque<usize> = (0..w * h)
        .filter(|&i| original[i] && neighbors(i, w, h).any(|n| n.is_none_or(|j| !original[j])))
        .collect();

    while let Some(i) = queue.pop_front() {
        if visited[i] {
            continue;
        }
        visited[i] = true;
        let (ex, ey) = field.nearest_at(i).expect("edge map is non-empty");
        if !original[ey * w + ex] || !removable(i) {
            continue;
        }
        out[i] = false;
        if edges.data()[i] {
            continue;
        }
        for j in neighbors(i, w, h).flatten() {
            if !visited[j] && out[j] {
                queue.push_back(j);
            }
        }
    }
    BinaryMask::new(w, h, out)
}

/// Soft alpha from a binary mask: `min(1, d / radius)` inside, where `d` is
/// the Euclidean distance to the nearest non-mask pixel, and 0 outside.
/// A zero radius returns the mask unchanged.
pub fn feather_mask(mask: &BinaryMask, radius: f64) -> Result<AlphaMask> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::InvalidValue(format!("feather radius must be >= 0, got {radius}")));
    }
    if radius == 0.0 {
        return Ok(mask.to_alpha());
    }
    let alpha = interior_distance(mask)
        .into_iter()
        .map(|d| (d / radius).min(1.0))
        .collect();
    AlphaMask::new(mask.width(), mask.height(), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(w: usize, h: usize) -> BinaryMask {
        BinaryMask::filled(w, h, true).unwrap()
    }

    #[test]
    fn no_edges_passes_through() {
        let m = BinaryMask::from_fn(10, 10, |x, y| (x + y) % 3 != 0).unwrap();
        let out = refine_mask(&m, &EdgeMap::empty(10, 10), &PipelineConfig::default()).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn corner_edge_in_full_mask_erases_everything() {
        let e = EdgeMap::from_points(8, 8, &[(0, 0)]).unwrap();
        let out = refine_mask(&full(8, 8), &e, &PipelineConfig::default()).unwrap();
        assert_eq!(out.count(), 0);
    }

    #[test]
    fn edge_outside_mask_keeps_everything() {
        let m = BinaryMask::from_fn(8, 8, |x, _| x < 4).unwrap();
        let e = EdgeMap::from_points(8, 8, &[(7, 3)]).unwrap();
        assert_eq!(refine_mask(&m, &e, &PipelineConfig::default()).unwrap(), m);
    }

    #[test]
    fn closed_contour_stops_erosion() {
        // mask [1, 11)², edge ring on the border of [3, 9)²
        let m = BinaryMask::from_fn(12, 12, |x, y| (1..11).contains(&x) && (1..11).contains(&y)).unwrap();
        let mut pts = Vec::new();
        for k in 3..9 {
            pts.extend([(k, 3), (k, 8), (3, k), (8, k)]);
        }
        let e = EdgeMap::from_points(12, 12, &pts).unwrap();
        let out = refine_mask(&m, &e, &PipelineConfig::default()).unwrap();
        let want = BinaryMask::from_fn(12, 12, |x, y| (4..8).contains(&x) && (4..8).contains(&y)).unwrap();
        assert_eq!(out, want);
    }

    #[test]
    fn erosion_cap_limits_depth() {
        let e = EdgeMap::from_points(8, 8, &[(0, 0)]).unwrap();
        let cfg = PipelineConfig {
            erosion_cap: Some(1.0),
            ..Default::default()
        };
        let out = refine_mask(&full(8, 8), &e, &cfg).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let border = x == 0 || y == 0 || x == 7 || y == 7;
                assert_eq!(out.get(x, y), !border, "({x},{y})");
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let r = refine_mask(&full(4, 4), &EdgeMap::empty(4, 5), &PipelineConfig::default());
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn strip_feathering() {
        let m = BinaryMask::from_fn(12, 1, |x, _| x != 0 && x != 11).unwrap();
        let a = feather_mask(&m, 3.0).unwrap();
        let want = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0];
        assert_eq!(a.data(), &want);
    }

    #[test]
    fn zero_radius_is_binary() {
        let m = BinaryMask::from_fn(5, 4, |x, y| x > y).unwrap();
        assert_eq!(feather_mask(&m, 0.0).unwrap(), m.to_alpha());
        assert!(feather_mask(&m, -1.0).is_err());
    }

    #[test]
    fn full_mask_feathers_to_one() {
        let a = feather_mask(&full(4, 3), 5.0).unwrap();
        assert!(a.data().iter().all(|&v| v == 1.0));
    }
}
