use std::process::ExitCode;

use clap::Parser;
use regionxfer::stylemath::{read_fmap, style_loss};
use regionxfer::{
    alpha_blend, canny_edges, content_loss, feather_mask, load_alpha, load_image, load_mask, refine_mask,
    run_pipeline, save_alpha, save_image, save_mask, total_loss, CovarianceMode, Error, GramMatrix, LossWeights,
    PipelineConfig, PipelineInputs,
};

mod args;

use args::{BlendArgs, Cli, ColorTransferArgs, Command, FeatherArgs, LossesArgs, RefineArgs, RunArgs};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::Io { .. } | Error::Format { .. } => EXIT_IO,
        Error::InvalidConfig(_) => EXIT_USAGE,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::RefineMask(a) => refine(a),
        Command::Feather(a) => feather(a),
        Command::ColorTransfer(a) => color_transfer(a),
        Command::Blend(a) => blend(a),
        Command::Losses(a) => losses(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(a: RunArgs) -> regionxfer::Result<()> {
    let config = a.config();
    config.validate()?;
    let inputs = PipelineInputs {
        content: load_image(&a.content)?,
        style: load_image(&a.style)?,
        mask: load_mask(&a.mask, config.mask_threshold)?,
        stylized_background: a.stylized_bg.as_ref().map(load_image).transpose()?,
        config,
    };
    let out = run_pipeline(&inputs)?;
    if let Some(dir) = &a.dump_stages {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        out.dump(dir)?;
    }
    save_image(&out.blended, &a.out)
}

fn refine(a: RefineArgs) -> regionxfer::Result<()> {
    let mut cfg = PipelineConfig::default();
    a.edges.apply(&mut cfg);
    cfg.validate()?;
    let image = load_image(&a.image)?;
    let mask = load_mask(&a.mask, cfg.mask_threshold)?;
    if mask.dims() != image.dims() {
        return Err(Error::DimensionMismatch {
            what: "mask vs image",
            expected: image.dims(),
            found: mask.dims(),
        });
    }
    let edges = canny_edges(&image, &cfg)?;
    save_mask(&refine_mask(&mask, &edges, &cfg)?, &a.out)
}

fn feather(a: FeatherArgs) -> regionxfer::Result<()> {
    PipelineConfig {
        feather_radius: a.radius,
        mask_threshold: a.mask_threshold,
        ..Default::default()
    }
    .validate()?;
    let mask = load_mask(&a.mask, a.mask_threshold)?;
    save_alpha(&feather_mask(&mask, a.radius)?, &a.out)
}

fn color_transfer(a: ColorTransferArgs) -> regionxfer::Result<()> {
    let content = load_image(&a.content)?;
    let style = load_image(&a.style)?;
    let mask = a.mask.as_ref().map(|p| load_mask(p, a.mask_threshold)).transpose()?;
    let mode = if a.uncentered {
        CovarianceMode::Uncentered
    } else {
        CovarianceMode::Centered
    };
    let out = regionxfer::colorxfer::transfer_colors_with(&content, &style, mask.as_ref(), mode)?;
    save_image(&out, &a.out)
}

fn blend(a: BlendArgs) -> regionxfer::Result<()> {
    let fg = load_image(&a.fg)?;
    let bg = load_image(&a.bg)?;
    let alpha = load_alpha(&a.alpha)?;
    save_image(&alpha_blend(&fg, &bg, &alpha)?, &a.out)
}

fn losses(a: LossesArgs) -> regionxfer::Result<()> {
    let generated = a.generated.iter().map(read_fmap).collect::<regionxfer::Result<Vec<_>>>()?;
    let original = read_fmap(&a.original)?;
    let grams = a
        .style_grams
        .iter()
        .map(|p| read_fmap(p).and_then(GramMatrix::try_from))
        .collect::<regionxfer::Result<Vec<_>>>()?;
    let layer_weights = a
        .layer_weights
        .unwrap_or_else(|| LossWeights::uniform(generated.len()).layer_weights);
    let weights = LossWeights::new(layer_weights, a.alpha, a.beta)?;
    let content_map = generated.get(a.content_layer).ok_or_else(|| {
        Error::InvalidValue(format!(
            "content layer {} out of range for {} generated maps",
            a.content_layer,
            generated.len()
        ))
    })?;
    let lc = content_loss(content_map, &original)?;
    let ls = style_loss(&generated, &grams, &weights)?;
    let lt = total_loss(lc, ls, &weights);
    println!("content_loss {}", format_sig(lc, 12));
    println!("style_loss {}", format_sig(ls, 12));
    println!("total_loss {}", format_sig(lt, 12));
    Ok(())
}

/// Decimal rendering with `digits` significant digits; scientific notation
/// outside `[1e-5, 1e15)`.
fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // round first so the exponent reflects any carry (9.99.. -> 10.0)
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..15).contains(&exp) {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let rounded: f64 = format!("{mantissa}e{exp}").parse().expect("round trip");
    format!("{rounded:.decimals$}")
}
