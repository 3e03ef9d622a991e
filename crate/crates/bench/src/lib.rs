//! Synthetic inputs shared by the benchmarks.

use regionxfer::{BinaryMask, EdgeMap, ImageRgb, PipelineConfig, PipelineInputs};

fn dist(x: usize, y: usize, size: usize) -> f64 {
    let c = size as f64 / 2.0;
    (x as f64 - c).hypot(y as f64 - c)
}

/// Dark disk of radius `size / 6` on a bright ramp.
pub fn disk_scene(size: usize) -> ImageRgb {
    let r = size as f64 / 6.0;
    ImageRgb::from_fn(size, size, |x, y| {
        let t = x as f64 / size as f64;
        if dist(x, y, size) <= r {
            [0.15, 0.1 + 0.05 * t, 0.1]
        } else {
            [0.9 - 0.2 * t, 0.85, 0.7]
        }
    })
    .unwrap()
}

/// Two-color checkerboard with `cell`-pixel squares.
pub fn checkerboard(size: usize, cell: usize) -> ImageRgb {
    ImageRgb::from_fn(size, size, |x, y| {
        if (x / cell + y / cell).is_multiple_of(2) {
            [0.9, 0.25, 0.1]
        } else {
            [0.1, 0.3, 0.8]
        }
    })
    .unwrap()
}

/// Disk mask 40% larger than the disk in [`disk_scene`].
pub fn disk_mask(size: usize) -> BinaryMask {
    let r = size as f64 / 6.0 * 1.4;
    BinaryMask::from_fn(size, size, |x, y| dist(x, y, size) <= r).unwrap()
}

/// Deterministic scatter of edge pixels, roughly one in `period`.
pub fn scattered_edges(size: usize, period: usize) -> EdgeMap {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let data = (0..size * size)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state.is_multiple_of(period as u64)
        })
        .collect();
    EdgeMap::new(size, size, data).unwrap()
}

pub fn pipeline_inputs(size: usize) -> PipelineInputs {
    PipelineInputs {
        content: disk_scene(size),
        style: checkerboard(size, size / 8),
        mask: disk_mask(size),
        stylized_background: None,
        config: PipelineConfig::default(),
    }
}
