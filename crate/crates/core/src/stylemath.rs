//! Style-transfer objective on externally supplied feature maps.
//!
//! A layer's activations form an `N × M` matrix (`N` filters, `M` spatial
//! positions). Style is summarized by the Gram matrix `G = F Fᵀ`. Losses and
//! their analytic gradients are provided so an external optimizer can drive
//! them; no network lives here.
//!
//! Feature maps travel on disk in the FMAP container: the bytes `FMAP`, a
//! version byte (1), little-endian `u32` rows and columns, then row-major
//! little-endian `f64` values.

use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.15;
pub const DEFAULT_BETA: f64 = 0.85;

const FMAP_MAGIC: &[u8; 4] = b"FMAP";
const FMAP_VERSION: u8 = 1;
const FMAP_HEADER: usize = 4 + 1 + 4 + 4;

/// `N_l × M_l` activation matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    n_filters: usize,
    map_size: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(n_filters: usize, map_size: usize, data: Vec<f64>) -> Result<Self> {
        if n_filters == 0 || map_size == 0 {
            return Err(Error::ZeroDimension);
        }
        if data.len() != n_filters * map_size {
            return Err(Error::InvalidValue(format!(
                "feature map: {} values for {n_filters}x{map_size}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!("non-finite activation {v}")));
        }
        Ok(Self {
            n_filters,
            map_size,
            data,
        })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidValue("ragged feature map rows".into()));
        }
        Self::new(rows.len(), m, rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    pub fn zeros(n_filters: usize, map_size: usize) -> Result<Self> {
        Self::new(n_filters, map_size, vec![0.0; n_filters * map_size])
    }

    pub fn n_filters(&self) -> usize {
        self.n_filters
    }

    pub fn map_size(&self) -> usize {
        self.map_size
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.map_size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.map_size..(i + 1) * self.map_size]
    }

    fn same_shape(&self, other: &FeatureMap, what: &'static str) -> Result<()> {
        if (self.n_filters, self.map_size) != (other.n_filters, other.map_size) {
            return Err(Error::DimensionMismatch {
                what,
                expected: (self.n_filters, self.map_size),
                found: (other.n_filters, other.map_size),
            });
        }
        Ok(())
    }
}

/// Symmetric `n × n` Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    data: Vec<f64>,
}

impl GramMatrix {
    /// Accepts a square, finite matrix that is symmetric within 1e-12
    /// (relative to its largest entry when that exceeds 1).
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        let fm = FeatureMap::new(n, n, data)?;
        let scale = fm.data.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for i in 0..n {
            for j in i + 1..n {
                if (fm.get(i, j) - fm.get(j, i)).abs() > 1e-12 * scale {
                    return Err(Error::InvalidValue(format!(
                        "gram matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, data: fm.data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn to_feature_map(&self) -> FeatureMap {
        FeatureMap {
            n_filters: self.n,
            map_size: self.n,
            data: self.data.clone(),
        }
    }
}

impl TryFrom<FeatureMap> for GramMatrix {
    type Error = Error;

    fn try_from(f: FeatureMap) -> Result<Self> {
        if f.n_filters != f.map_size {
            return Err(Error::DimensionMismatch {
                what: "gram matrix must be square",
                expected: (f.n_filters, f.n_filters),
                found: (f.n_filters, f.map_size),
            });
        }
        GramMatrix::new(f.n_filters, f.data)
    }
}

/// Per-layer style weights and the content/style balance.
#[derive(Debug, Clone, PartialEq)]
pub struct LossWeights {
    pub layer_weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl LossWeights {
    pub fn new(layer_weights: Vec<f64>, alpha: f64, beta: f64) -> Result<Self> {
        if layer_weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidValue("layer weights must be finite and >= 0".into()));
        }
        if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidValue(format!("alpha ({alpha}) and beta ({beta}) must be >= 0")));
        }
        if alpha + beta <= 0.0 {
            return Err(Error::InvalidValue("alpha + beta must be positive".into()));
        }
        Ok(Self {
            layer_weights,
            alpha,
            beta,
        })
    }

    /// `1/L` per layer with the default 15:85 content/style balance.
    pub fn uniform(layers: usize) -> Self {
        let w = if layers == 0 { 0.0 } else { 1.0 / layers as f64 };
        Self {
            layer_weights: vec![w; layers],
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        }
    }
}

/// `G_ij = Σ_k F_ik F_jk`, summed in ascending `k`.
pub fn gram(f: &FeatureMap) -> GramMatrix {
    let n = f.n_filters;
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        let ri = f.row(i);
        for j in i..n {
            let v: f64 = ri.iter().zip(f.row(j)).map(|(a, b)| a * b).sum();
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    GramMatrix { n, data }
}

/// `½ Σ (F - P)²`.
pub fn content_loss(f: &FeatureMap, p: &FeatureMap) -> Result<f64> {
    f.same_shape(p, "content feature maps")?;
    Ok(0.5 * f.data.iter().zip(&p.data).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
}

pub fn content_loss_grad(f: &FeatureMap, p: &FeatureMap) -> Result<FeatureMap> {
    f.same_shape(p, "content feature maps")?;
    Ok(FeatureMap {
        n_filters: f.n_filters,
        map_size: f.map_size,
        data: f.data.iter().zip(&p.data).map(|(a, b)| a - b).collect(),
    })
}

fn check_gram(f: &FeatureMap, a: &GramMatrix) -> Result<()> {
    if a.n != f.n_filters {
        return Err(Error::DimensionMismatch {
            what: "style gram vs generated filters",
            expected: (f.n_filters, f.n_filters),
            found: (a.n, a.n),
        });
    }
    Ok(())
}

/// One layer's term: `w / (4 N² M²) Σ (G - A)²`.
pub fn style_layer_loss(f: &FeatureMap, a: &GramMatrix, weight: f64) -> Result<f64> {
    check_gram(f, a)?;
    let g = gram(f);
    let (n, m) = (f.n_filters as f64, f.map_size as f64);
    let sq: f64 = g.data.iter().zip(&a.data).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(weight / (4.0 * n * n * m * m) * sq)
}

/// Weighted sum of per-layer Gram discrepancies.
pub fn style_loss(generated: &[FeatureMap], style_grams: &[GramMatrix], w: &LossWeights) -> Result<f64> {
    if generated.len() != style_grams.len() || generated.len() != w.layer_weights.len() {
        return Err(Error::InvalidValue(format!(
            "layer count mismatch: {} generated, {} style grams, {} weights",
            generated.len(),
            style_grams.len(),
            w.layer_weights.len()
        )));
    }
    generated
        .iter()
        .zip(style_grams)
        .zip(&w.layer_weights)
        .map(|((f, a), &wl)| style_layer_loss(f, a, wl))
        .sum()
}

/// Gradient of [`style_layer_loss`] with respect to `F`:
/// `w / (N² M²) · (G - A) · F`.
pub fn style_loss_grad(f: &FeatureMap, a: &GramMatrix, weight: f64) -> Result<FeatureMap> {
    check_gram(f, a)?;
    let g = gram(f);
    let (n, m) = (f.n_filters, f.map_size);
    let scale = weight / ((n * n) as f64 * (m * m) as f64);
    let mut out = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..n {
            let d = g.get(i, j) - a.get(i, j);
            if d == 0.0 {
                continue;
            }
            let fj = f.row(j);
            for k in 0..m {
                out[i * m + k] += d * fj[k];
            }
        }
    }
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(FeatureMap {
        n_filters: n,
        map_size: m,
        data: out,
    })
}

pub fn total_loss(content: f64, style: f64, w: &LossWeights) -> f64 {
    w.alpha * content + w.beta * style
}

pub fn encode_fmap(f: &FeatureMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(FMAP_HEADER + f.data.len() * 8);
    out.extend_from_slice(FMAP_MAGIC);
    out.push(FMAP_VERSION);
    out.extend_from_slice(&(f.n_filters as u32).to_le_bytes());
    out.extend_from_slice(&(f.map_size as u32).to_le_bytes());
    for v in &f.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_fmap(bytes: &[u8]) -> Result<FeatureMap> {
    let bad = |msg: String| Error::InvalidValue(format!("FMAP: {msg}"));
    if bytes.len() < FMAP_HEADER {
        return Err(bad(format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[..4] != FMAP_MAGIC {
        return Err(bad("bad magic".into()));
    }
    if bytes[4] != FMAP_VERSION {
        return Err(bad(format!("unsupported version {}", bytes[4])));
    }
    let rows = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[9..13].try_into().unwrap()) as usize;
    let body = &bytes[FMAP_HEADER..];
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| bad("size overflow".into()))?;
    if body.len() != expected {
        return Err(bad(format!(
            "{rows}x{cols} needs {expected} payload bytes, found {}",
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    FeatureMap::new(rows, cols, data)
}

pub fn read_fmap(path: impl AsRef<Path>) -> Result<FeatureMap> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_fmap(&bytes).map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_fmap(f: &FeatureMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_fmap(f)).map_err(|e| Error::io(path, e))
}
