//! Alpha compositing and the end-to-end regional transfer pipeline.

use std::path::Path;

use crate::boundary::{canny_edges, feather_mask, refine_mask, EdgeMap};
use crate::colorxfer::transfer_colors_with;
use crate::error::{Error, Result, Stage};
use crate::imgcore::{save_alpha, save_image, save_mask, AlphaMask, BinaryMask, ImageRgb, PipelineConfig};

/// `C = α·color + (1 - α)·style`, per pixel and channel.
///
/// Results are clamped to the per-pixel interval spanned by the two inputs,
/// so rounding never pushes a channel outside it.
pub fn alpha_blend(color_img: &ImageRgb, style_img: &ImageRgb, alpha: &AlphaMask) -> Result<ImageRgb> {
    for (what, dims) in [("style image", style_img.dims()), ("alpha mask", alpha.dims())] {
        if dims != color_img.dims() {
            return Err(Error::DimensionMismatch {
                what,
                expected: color_img.dims(),
                found: dims,
            });
        }
    }
    let data = color_img
        .data()
        .iter()
        .zip(style_img.data())
        .enumerate()
        .map(|(i, (&c, &s))| {
            let a = alpha.data()[i / 3];
            (a * c + (1.0 - a) * s).clamp(c.min(s), c.max(s))
        })
        .collect();
    ImageRgb::new(color_img.width(), color_img.height(), data)
}

/// Everything the pipeline consumes.
#[derive(Debug, Clone)]
pub struct PipelineInputs {
    pub content: ImageRgb,
    pub style: ImageRgb,
    pub mask: BinaryMask,
    /// Externally stylized background. When absent the content image is
    /// used, giving foreground-only color transfer.
    pub stylized_background: Option<ImageRgb>,
    pub config: PipelineConfig,
}

impl PipelineInputs {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let dims = self.content.dims();
        if self.mask.dims() != dims {
            return Err(Error::DimensionMismatch {
                what: "mask vs content",
                expected: dims,
                found: self.mask.dims(),
            });
        }
        if let Some(bg) = &self.stylized_background {
            if bg.dims() != dims {
                return Err(Error::DimensionMismatch {
                    what: "stylized background vs content",
                    expected: dims,
                    found: bg.dims(),
                });
            }
        }
        Ok(())
    }
}

/// Final image plus every intermediate, for inspection.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub edges: EdgeMap,
    pub refined_mask: BinaryMask,
    pub alpha: AlphaMask,
    pub foreground: ImageRgb,
    pub background: ImageRgb,
    pub blended: ImageRgb,
}

impl PipelineOutput {
    /// Writes each stage as a PNG into `dir`, which must exist.
    pub fn dump(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let edges = BinaryMask::new(self.edges.width(), self.edges.height(), self.edges.data().to_vec())?;
        save_mask(&edges, dir.join("1_edges.png"))?;
        save_mask(&self.refined_mask, dir.join("2_refined_mask.png"))?;
        save_alpha(&self.alpha, dir.join("3_alpha.png"))?;
        save_image(&self.foreground, dir.join("4_foreground.png"))?;
        save_image(&self.background, dir.join("5_background.png"))?;
        save_image(&self.blended, dir.join("6_blended.png"))
    }
}

/// Edges, mask refinement, feathering, foreground color transfer, blend.
pub fn run_pipeline(inputs: &PipelineInputs) -> Result<PipelineOutput> {
    inputs.validate().map_err(|e| e.at(Stage::Validate))?;
    let edges = canny_edges(&inputs.content, &inputs.config).map_err(|e| e.at(Stage::Edges))?;
    run_pipeline_with_edges(inputs, edges)
}

/// As [`run_pipeline`], with a caller-supplied edge map in place of edge detection.
pub fn run_pipeline_with_edges(inputs: &PipelineInputs, edges: EdgeMap) -> Result<PipelineOutput> {
    inputs.validate().map_err(|e| e.at(Stage::Validate))?;
    let cfg = &inputs.config;
    let refined_mask = refine_mask(&inputs.mask, &edges, cfg).map_err(|e| e.at(Stage::Refine))?;
    let alpha = feather_mask(&refined_mask, cfg.feather_radius).map_err(|e| e.at(Stage::Feather))?;
    let foreground = if refined_mask.count() == 0 {
        // nothing to recolor; alpha is zero everywhere
        inputs.content.clone()
    } else {
        transfer_colors_with(&inputs.content, &inputs.style, Some(&refined_mask), cfg.covariance)
            .map_err(|e| e.at(Stage::ColorTransfer))?
    };
    let background = inputs
        .stylized_background
        .clone()
        .unwrap_or_else(|| inputs.content.clone());
    let blended = alpha_blend(&foreground, &background, &alpha).map_err(|e| e.at(Stage::Blend))?;
    Ok(PipelineOutput {
        edges,
        refined_mask,
        alpha,
        foreground,
        background,
        blended,
    })
}
