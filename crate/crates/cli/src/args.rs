use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use regionxfer::{CovarianceMode, PipelineConfig};

#[derive(Parser, Debug)]
#[command(name = "regionxfer", version, about = "Regional style and color transfer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full pipeline: refine mask, feather, recolor foreground, blend over background.
    Run(RunArgs),
    /// Refine a foreground mask against the image's Canny edges.
    RefineMask(RefineArgs),
    /// Turn a binary mask into an 8-bit grayscale alpha ramp.
    Feather(FeatherArgs),
    /// Recolor an image (or its masked region) from a style image.
    ColorTransfer(ColorTransferArgs),
    /// Composite foreground over background with an alpha image.
    Blend(BlendArgs),
    /// Evaluate content, style and total losses on FMAP feature maps.
    Losses(LossesArgs),
}

#[derive(Args, Debug, Clone)]
pub struct EdgeArgs {
    #[arg(long)]
    pub canny_sigma: Option<f64>,
    /// Low hysteresis threshold as a fraction of the maximum gradient.
    #[arg(long)]
    pub canny_low: Option<f64>,
    /// High hysteresis threshold as a fraction of the maximum gradient.
    #[arg(long)]
    pub canny_high: Option<f64>,
    /// Only erode pixels within this distance of the original mask boundary.
    #[arg(long)]
    pub erosion_cap: Option<f64>,
    /// Mask intensity at or above which a pixel is foreground.
    #[arg(long)]
    pub mask_threshold: Option<f64>,
}

impl EdgeArgs {
    pub fn apply(&self, cfg: &mut PipelineConfig) {
        if let Some(v) = self.canny_sigma {
            cfg.canny_sigma = v;
        }
        if let Some(v) = self.canny_low {
            cfg.canny_low = v;
        }
        if let Some(v) = self.canny_high {
            cfg.canny_high = v;
        }
        if let Some(v) = self.mask_threshold {
            cfg.mask_threshold = v;
        }
        cfg.erosion_cap = self.erosion_cap;
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub content: PathBuf,
    #[arg(long)]
    pub style: PathBuf,
    #[arg(long)]
    pub mask: PathBuf,
    /// Stylized background; the content image is used when omitted.
    #[arg(long)]
    pub stylized_bg: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Feather radius in pixels.
    #[arg(long, allow_negative_numbers = true)]
    pub feather: Option<f64>,
    #[command(flatten)]
    pub edges: EdgeArgs,
    /// Use the raw XᵀX scatter matrix instead of the covariance.
    #[arg(long)]
    pub uncentered: bool,
    /// Write every intermediate stage as PNG into this directory.
    #[arg(long)]
    pub dump_stages: Option<PathBuf>,
}

impl RunArgs {
    pub fn config(&self) -> PipelineConfig {
        let mut cfg = PipelineConfig::default();
        self.edges.apply(&mut cfg);
        if let Some(r) = self.feather {
            cfg.feather_radius = r;
        }
        if self.uncentered {
            cfg.covariance = CovarianceMode::Uncentered;
        }
        cfg
    }
}

#[derive(Args, Debug)]
pub struct RefineArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub edges: EdgeArgs,
}

#[derive(Args, Debug)]
pub struct FeatherArgs {
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub radius: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub mask_threshold: f64,
}

#[derive(Args, Debug)]
pub struct ColorTransferArgs {
    #[arg(long)]
    pub content: PathBuf,
    #[arg(long)]
    pub style: PathBuf,
    /// Restrict the transfer to this mask's foreground.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub mask_threshold: f64,
    #[arg(long)]
    pub uncentered: bool,
}

#[derive(Args, Debug)]
pub struct BlendArgs {
    #[arg(long)]
    pub fg: PathBuf,
    #[arg(long)]
    pub bg: PathBuf,
    #[arg(long)]
    pub alpha: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct LossesArgs {
    /// Generated-image feature maps, one per style layer.
    #[arg(long, num_args = 1.., required = true)]
    pub generated: Vec<PathBuf>,
    /// Content-image feature map for the content layer.
    #[arg(long)]
    pub original: PathBuf,
    /// Style Gram matrices, one per layer, stored as square FMAP files.
    #[arg(long, num_args = 1.., required = true)]
    pub style_grams: Vec<PathBuf>,
    /// Index into --generated of the map compared against --original.
    #[arg(long, default_value_t = 0)]
    pub content_layer: usize,
    /// Per-layer style weights; defaults to 1/L each.
    #[arg(long, num_args = 1..)]
    pub layer_weights: Option<Vec<f64>>,
    #[arg(long, default_value_t = regionxfer::stylemath::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = regionxfer::stylemath::DEFAULT_BETA)]
    pub beta: f64,
}
