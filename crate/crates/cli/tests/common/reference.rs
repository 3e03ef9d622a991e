//! Straight-line reference of the full pipeline, written directly from the
//! stage definitions with brute-force searches everywhere. Used to produce
//! and cross-check the golden image.

use std::path::Path;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

pub type Rgb = [f64; 3];

pub struct Scene {
    pub w: usize,
    pub h: usize,
    pub content: Vec<Rgb>,
    pub style: Vec<Rgb>,
    pub mask: Vec<bool>,
}

impl Scene {
    pub fn load(content: &Path, style: &Path, mask: &Path) -> Scene {
        let c = image::open(content).unwrap().to_rgb8();
        let s = image::open(style).unwrap().to_rgb8();
        let m = image::open(mask).unwrap().to_luma8();
        let rgb = |img: &image::RgbImage| -> Vec<Rgb> {
            img.pixels().map(|p| p.0.map(|b| b as f64 / 255.0)).collect()
        };
        Scene {
            w: c.width() as usize,
            h: c.height() as usize,
            content: rgb(&c),
            style: rgb(&s),
            mask: m.pixels().map(|p| p.0[0] as f64 / 255.0 >= 0.5).collect(),
        }
    }
}

pub struct Stages {
    pub edges: Vec<bool>,
    pub refined: Vec<bool>,
    pub alpha: Vec<f64>,
    pub foreground: Vec<Rgb>,
    pub blended: Vec<u8>,
}

const SIGMA: f64 = 1.4;
const LOW: f64 = 0.1;
const HIGH: f64 = 0.3;
const FEATHER: f64 = 4.0;

pub fn run(scene: &Scene) -> Stages {
    let edges = canny(scene);
    let refined = refine(scene, &edges);
    let alpha = feather(scene, &refined);
    let foreground = transfer(scene, &refined);
    let mut blended = Vec::with_capacity(scene.w * scene.h * 3);
    for i in 0..scene.w * scene.h {
        for c in 0..3 {
            let (f, b) = (foreground[i][c], scene.content[i][c]);
            let v = (alpha[i] * f + (1.0 - alpha[i]) * b).clamp(f.min(b), f.max(b));
            blended.push((v * 255.0 + 0.5).floor() as u8);
        }
    }
    Stages {
        edges,
        refined,
        alpha,
        foreground,
        blended,
    }
}

fn canny(scene: &Scene) -> Vec<bool> {
    let (w, h) = (scene.w as i64, scene.h as i64);
    let at = |v: &[f64], x: i64, y: i64| v[(y.clamp(0, h - 1) * w + x.clamp(0, w - 1)) as usize];
    let luma: Vec<f64> = scene
        .content
        .iter()
        .map(|p| 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2])
        .collect();

    let r = (3.0 * SIGMA).ceil() as i64;
    let g: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * SIGMA * SIGMA)).exp()).collect();
    let gsum: f64 = g.iter().sum();
    let mut blur = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for j in -r..=r {
                let mut row = 0.0;
                for i in -r..=r {
                    row += g[(i + r) as usize] / gsum * at(&luma, x + i, y + j);
                }
                acc += g[(j + r) as usize] / gsum * row;
            }
            blur[(y * w + x) as usize] = acc;
        }
    }

    let n = (w * h) as usize;
    let (mut gx, mut gy, mut mag) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for y in 0..h {
        for x in 0..w {
            let b = |dx: i64, dy: i64| at(&blur, x + dx, y + dy);
            let i = (y * w + x) as usize;
            gx[i] = b(1, -1) + 2.0 * b(1, 0) + b(1, 1) - b(-1, -1) - 2.0 * b(-1, 0) - b(-1, 1);
            gy[i] = b(-1, 1) + 2.0 * b(0, 1) + b(1, 1) - b(-1, -1) - 2.0 * b(0, -1) - b(1, -1);
            mag[i] = gx[i].hypot(gy[i]);
        }
    }
    let max = mag.iter().cloned().fold(0.0, f64::max);
    if max <= 1e-9 {
        return vec![false; n];
    }
    let tol = 1e-9 * max;
    let m_at = |x: i64, y: i64| {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            mag[(y * w + x) as usize]
        }
    };
    let mut thin = vec![0.0; n];
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            if mag[i] <= 1e-9 {
                continue;
            }
            let deg = gy[i].atan2(gx[i]).to_degrees().rem_euclid(180.0);
            let (dx, dy) = match deg {
                d if !(22.5..157.5).contains(&d) => (1, 0),
                d if d < 67.5 => (1, 1),
                d if d < 112.5 => (0, 1),
                _ => (-1, 1),
            };
            if mag[i] >= m_at(x + dx, y + dy) - tol && mag[i] > m_at(x - dx, y - dy) + tol {
                thin[i] = mag[i];
            }
        }
    }

    let (lo, hi) = ((LOW * max).max(1e-9), (HIGH * max).max(1e-9));
    let mut edge: Vec<bool> = thin.iter().map(|&m| m >= hi).collect();
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) as usize;
                if edge[i] || thin[i] < lo {
                    continue;
                }
                let touches = (-1..=1).any(|dy| {
                    (-1..=1).any(|dx| {
                        let (nx, ny) = (x + dx, y + dy);
                        nx >= 0 && ny >= 0 && nx < w && ny < h && edge[(ny * w + nx) as usize]
                    })
                });
                if touches {
                    edge[i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return edge;
        }
    }
}

/// Nearest edge by full scan; ties to the smaller row, then column.
fn nearest_edge(scene: &Scene, edges: &[bool], i: usize) -> usize {
    let (px, py) = ((i % scene.w) as i64, (i / scene.w) as i64);
    (0..edges.len())
        .filter(|&j| edges[j])
        .min_by_key(|&j| {
            let (x, y) = ((j % scene.w) as i64, (j / scene.w) as i64);
            ((x - px).pow(2) + (y - py).pow(2), y, x)
        })
        .unwrap()
}

/// Flood from the mask periphery through pixels whose nearest edge lies
/// inside the mask; edge pixels are removed but do not spread.
fn refine(scene: &Scene, edges: &[bool]) -> Vec<bool> {
    let (w, h) = (scene.w, scene.h);
    if !edges.iter().any(|&e| e) {
        return scene.mask.clone();
    }
    let nbrs = |i: usize| {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        [(0, -1), (-1, 0), (1, 0), (0, 1)].map(|(dx, dy): (i64, i64)| {
            let (nx, ny) = (x + dx, y + dy);
            (nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64).then(|| ny as usize * w + nx as usize)
        })
    };
    let erodible: Vec<bool> = (0..w * h)
        .map(|i| scene.mask[i] && scene.mask[nearest_edge(scene, edges, i)])
        .collect();
    let mut removed = vec![false; w * h];
    let mut stack: Vec<usize> = (0..w * h)
        .filter(|&i| scene.mask[i] && nbrs(i).iter().any(|n| n.map_or(true, |j| !scene.mask[j])))
        .collect();
    while let Some(i) = stack.pop() {
        if removed[i] || !erodible[i] {
            continue;
        }
        removed[i] = true;
        if !edges[i] {
            stack.extend(nbrs(i).into_iter().flatten().filter(|&j| scene.mask[j]));
        }
    }
    (0..w * h).map(|i| scene.mask[i] && !removed[i]).collect()
}

fn feather(scene: &Scene, mask: &[bool]) -> Vec<f64> {
    let w = scene.w;
    (0..mask.len())
        .map(|i| {
            if !mask[i] {
                return 0.0;
            }
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            let d = (0..mask.len())
                .filter(|&j| !mask[j])
                .map(|j| ((j % w) as f64 - x).hypot((j / w) as f64 - y))
                .fold(f64::INFINITY, f64::min);
            (d / FEATHER).min(1.0)
        })
        .collect()
}

fn lab(p: Rgb) -> Vector3<f64> {
    let m = Matrix3::new(0.3811, 0.5783, 0.0402, 0.1967, 0.7244, 0.0782, 0.0241, 0.1288, 0.8444);
    let lms = (m * Vector3::from(p)).map(|v| v.max(1e-5).log10());
    let t = Matrix3::new(1.0, 1.0, 1.0, 1.0, 1.0, -2.0, 1.0, -1.0, 0.0);
    let s = Matrix3::from_diagonal(&Vector3::new(1.0 / 3f64.sqrt(), 1.0 / 6f64.sqrt(), 1.0 / 2f64.sqrt()));
    s * t * lms
}

fn axis(points: &[Vector3<f64>]) -> Vector3<f64> {
    let n = points.len() as f64;
    let mean = points.iter().sum::<Vector3<f64>>() / n;
    let cov = points
        .iter()
        .map(|p| (p - mean) * (p - mean).transpose())
        .sum::<Matrix3<f64>>()
        / n;
    let eig = SymmetricEigen::new(cov);
    let q = eig.eigenvectors.column(eig.eigenvalues.imax()).into_owned();
    if q.iter().find(|c| c.abs() > 1e-12).is_some_and(|c| *c < 0.0) {
        -q
    } else {
        q
    }
}

/// Rank matching: a content pixel at mid-rank `u` of the selected content
/// takes the style pixel at rank `round(u · (N_s - 1))`.
fn transfer(scene: &Scene, selected: &[bool]) -> Vec<Rgb> {
    let mut out = scene.content.clone();
    let idx: Vec<usize> = (0..selected.len()).filter(|&i| selected[i]).collect();
    if idx.is_empty() {
        return out;
    }
    let c_lab: Vec<_> = idx.iter().map(|&i| lab(scene.content[i])).collect();
    let s_lab: Vec<_> = scene.style.iter().map(|&p| lab(p)).collect();
    let (qc, qs) = (axis(&c_lab), axis(&s_lab));
    let pc: Vec<f64> = c_lab.iter().map(|v| qc.dot(v)).collect();
    let ps: Vec<f64> = s_lab.iter().map(|v| qs.dot(v)).collect();
    let mut order: Vec<usize> = (0..ps.len()).collect();
    order.sort_by(|&a, &b| ps[a].total_cmp(&ps[b]).then(a.cmp(&b)));
    let (nc, ns) = (pc.len(), ps.len());
    for (k, &i) in idx.iter().enumerate() {
        let less = pc.iter().filter(|&&v| v < pc[k]).count() as f64;
        let eq = pc.iter().filter(|&&v| v == pc[k]).count() as f64;
        let u = if nc == 1 { 0.5 } else { (less + (eq - 1.0) / 2.0) / (nc - 1) as f64 };
        let target = (u * (ns - 1) as f64 + 0.5).floor() as usize;
        out[i] = scene.style[order[target]];
    }
    out
}
