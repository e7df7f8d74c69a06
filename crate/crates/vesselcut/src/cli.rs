//! Command-line interface: single-image segmentation, manifest sweep and
//! synthetic dataset generation.
//!
//! Exit codes: 0 on success, 2 on input errors (missing or malformed
//! files, bad flags), 3 on segmentation errors (OpenContour and friends).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cutcost::{to_grayscale, CostError, CostMode, CostParams, GrayImage};
use crate::evalbench::{
    read_manifest, sigma_sweep, synth, EvalError, MaterialClass, SweepConfig,
    DEFAULT_TOLERANCE_FRACTION, MANIFEST_HEADER,
};
use crate::segment::{extract_boundary, render_overlay, segment, SegmentError, SegmentReport};
use crate::vessel::{VesselError, VesselMask};

#[derive(Debug, Parser)]
#[command(
    name = "vesselcut",
    version,
    about = "Trace material boundaries in transparent vessels via seeded min-cut"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment one image and write the result JSON (and overlay PNG)
    Segment(SegmentArgs),
    /// Run the cost-function sweep over a dataset manifest
    Sweep(SweepArgs),
    /// Generate a synthetic dataset with exact ground truth
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostArg {
    /// Exponential intensity-difference cost
    Exp,
    /// Linear intensity-difference cost
    Linear,
}

/// Cost shaping flags shared by `segment` and `sweep`.
#[derive(Debug, Args)]
pub struct ShapeFlags {
    /// Multiplier on horizontal edges (discourages vertical cuts)
    #[arg(long = "hfactor", default_value_t = 1.3)]
    pub horizontal_factor: f64,

    /// Cost multiplier inside the penalty zone near the vessel contour
    #[arg(long, default_value_t = 3.0)]
    pub penalty_factor: f64,

    /// Penalty zone radius in pixels [default: max(3, 2% of the widest vessel row)]
    #[arg(long)]
    pub penalty_distance: Option<f64>,

    /// Height fraction of each seed band, in (0, 0.5)
    #[arg(long, default_value_t = 0.10)]
    pub seed_fraction: f64,

    /// Disable division of edge costs by the vessel row width
    #[arg(long)]
    pub no_width_norm: bool,
}

impl ShapeFlags {
    fn apply(&self, params: &mut CostParams) {
        params.horizontal_factor = self.horizontal_factor;
        params.penalty_factor = self.penalty_factor;
        params.penalty_distance = self.penalty_distance;
        params.seed_fraction = self.seed_fraction;
        params.width_normalization = !self.no_width_norm;
    }
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Image of the transparent vessel
    pub image: PathBuf,

    /// Vessel contour image (nonzero pixels mark the contour)
    pub contour: PathBuf,

    /// Cost function
    #[arg(long, value_enum, default_value_t = CostArg::Exp)]
    pub cost: CostArg,

    /// Intensity scale of the exponential cost, in 0-255 units
    #[arg(long, default_value_t = 20.0)]
    pub sigma: f64,

    /// Use the image's intensity standard deviation as sigma
    #[arg(long)]
    pub auto_sigma: bool,

    #[command(flatten)]
    pub shape: ShapeFlags,

    /// Output directory for the result JSON (and overlay)
    #[arg(long, short = 'o', default_value = ".")]
    pub out: PathBuf,

    /// Write an overlay PNG with the boundary drawn in red
    #[arg(long)]
    pub overlay: bool,

    /// Write the filled vessel mask as a PNG (255 = interior)
    #[arg(long)]
    pub debug_mask: bool,

    /// Also report the number of connected material regions
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Dataset manifest: image,contour,groundtruth,class per line
    pub manifest: PathBuf,

    /// Comma-separated sigma values [default: 10,20,...,100 plus the linear row]
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,

    /// Add the linear-cost row when --sigmas is given
    #[arg(long)]
    pub linear: bool,

    /// Detection tolerance as a fraction of vessel height
    #[arg(long, default_value_t = DEFAULT_TOLERANCE_FRACTION)]
    pub tol: f64,

    #[command(flatten)]
    pub shape: ShapeFlags,

    /// Output directory for the CSV report
    #[arg(long, short = 'o', default_value = ".")]
    pub out: PathBuf,

    /// Worker threads for the entry pool [default: all cores]
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Flat,
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Liquid,
    Solid,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory for images, contours, ground truth and manifest
    #[arg(long, short = 'o', default_value = "synthetic")]
    pub out: PathBuf,

    /// Number of images to generate
    #[arg(long, default_value_t = 20)]
    pub count: usize,

    /// Image width in pixels
    #[arg(long, default_value_t = 320)]
    pub width: usize,

    /// Image height in pixels
    #[arg(long, default_value_t = 240)]
    pub height: usize,

    /// Boundary profile shape
    #[arg(long, value_enum, default_value_t = ProfileArg::Flat)]
    pub profile: ProfileArg,

    /// Boundary depth as a fraction of vessel height (0 = top, 1 = bottom)
    #[arg(long, default_value_t = 0.6)]
    pub row: f64,

    /// Extra center depth for the parabolic profile, as a height fraction
    #[arg(long, default_value_t = 0.08)]
    pub depth: f64,

    /// Gaussian intensity noise sigma
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,

    /// Speckle amplitude of a textured stratum inside the material (0 disables)
    #[arg(long, default_value_t = 0.0)]
    pub texture: f64,

    /// Material intensity
    #[arg(long, default_value_t = 40.0)]
    pub material: f64,

    /// Air intensity
    #[arg(long, default_value_t = 200.0)]
    pub air: f64,

    /// Material class recorded in the manifest
    #[arg(long, value_enum, default_value_t = ClassArg::Liquid)]
    pub class: ClassArg,

    /// Base RNG seed; image i uses seed + i
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug)]
pub enum CliError {
    /// Missing, unreadable or malformed inputs; exit code 2.
    Input(String),
    /// The pipeline rejected the scene (OpenContour etc.); exit code 3.
    Segmentation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Segmentation(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Input(m) | Self::Segmentation(m) => m,
        }
    }
}

fn vessel_error(e: VesselError) -> CliError {
    let code = match &e {
        VesselError::OpenContour => "OpenContour",
        VesselError::EmptyMask => "EmptyMask",
        VesselError::BandsOverlap { .. } => "BandsOverlap",
        VesselError::InvalidSeedFraction(_) => return CliError::Input(e.to_string()),
    };
    CliError::Segmentation(format!("{code}: {e}"))
}

fn cost_error(e: CostError) -> CliError {
    match e {
        CostError::DimensionMismatch(_) => {
            CliError::Segmentation(format!("DimensionMismatch: {e}"))
        }
        _ => CliError::Input(e.to_string()),
    }
}

fn segment_error(e: SegmentError) -> CliError {
    match e {
        SegmentError::Vessel(e) => vessel_error(e),
        SegmentError::Cost(e) => cost_error(e),
        SegmentError::NoBoundary => CliError::Segmentation(format!("NoBoundary: {e}")),
    }
}

fn eval_error(e: EvalError) -> CliError {
    CliError::Input(e.to_string())
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Segment(args) => run_segment(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Synth(args) => run_synth(args),
    }
}

fn run_segment(args: SegmentArgs) -> Result<(), CliError> {
    let decoded = image::open(&args.image)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.image.display())))?;
    let gray = to_grayscale(&decoded).map_err(cost_error)?;
    let contour = GrayImage::load(&args.contour).map_err(cost_error)?;
    let mask = VesselMask::from_contour(&contour).map_err(vessel_error)?;

    let mut params = CostParams {
        mode: match args.cost {
            CostArg::Exp => CostMode::Exponential,
            CostArg::Linear => CostMode::Linear,
        },
        sigma: args.sigma,
        ..CostParams::default()
    };
    args.shape.apply(&mut params);
    if args.auto_sigma {
        params.sigma = gray.intensity_std().max(1.0);
    }
    params.validate().map_err(cost_error)?;

    let labeling = segment(&gray, &mask, &params).map_err(segment_error)?;
    let curve = extract_boundary(&labeling, &mask);
    let report = SegmentReport::new(
        args.image.display().to_string(),
        &mask,
        &labeling,
        &curve,
        &params,
        args.strict,
    )
    .map_err(segment_error)?;

    std::fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    let stem = args
        .image
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "result".into());
    let json_path = args.out.join(format!("{stem}.json"));
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&json_path, &json).map_err(|e| io_error(&json_path, e))?;

    if args.overlay {
        let overlay_path = args.out.join(format!("{stem}_overlay.png"));
        render_overlay(&decoded, &curve)
            .save(&overlay_path)
            .map_err(|e| CliError::Input(format!("{}: {e}", overlay_path.display())))?;
    }
    if args.debug_mask {
        let mask_path = args.out.join(format!("{stem}_mask.png"));
        mask.to_debug_image()
            .save_png(&mask_path)
            .map_err(cost_error)?;
    }

    println!(
        "fill {:.4}  cut {:.4e}  boundary columns {}/{}  -> {}",
        report.fill_fraction,
        report.cut_value,
        curve.defined_count(),
        mask.width(),
        json_path.display()
    );
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<(), CliError> {
    let entries = read_manifest(&args.manifest).map_err(eval_error)?;
    let mut base_params = CostParams::default();
    args.shape.apply(&mut base_params);
    base_params.validate().map_err(cost_error)?;
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(CliError::Input(format!(
            "tolerance must be positive, got {}",
            args.tol
        )));
    }

    let config = match args.sigmas {
        Some(sigmas) => SweepConfig {
            sigmas,
            include_linear: args.linear,
            tol_fraction: args.tol,
            base_params,
            workers: args.workers,
        },
        None => SweepConfig {
            tol_fraction: args.tol,
            base_params,
            workers: args.workers,
            ..SweepConfig::default()
        },
    };

    let report = sigma_sweep(&entries, &config).map_err(eval_error)?;
    print!("{}", report.render_table());
    for skipped in &report.skipped {
        eprintln!("skipped {}: {}", skipped.image.display(), skipped.reason);
    }

    std::fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    let csv_path = args.out.join("sweep.csv");
    std::fs::write(&csv_path, report.to_csv()).map_err(|e| io_error(&csv_path, e))?;
    println!("report written to {}", csv_path.display());
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<(), CliError> {
    if args.count == 0 {
        return Err(CliError::Input("--count must be at least 1".into()));
    }
    if args.width < 16 || args.height < 16 {
        return Err(CliError::Input(format!(
            "images must be at least 16x16, got {}x{}",
            args.width, args.height
        )));
    }
    std::fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;

    let class = match args.class {
        ClassArg::Liquid => MaterialClass::Liquid,
        ClassArg::Solid => MaterialClass::Solid,
    };
    let mut manifest = String::from(MANIFEST_HEADER);
    manifest.push('\n');
    for i in 0..args.count {
        let spec = synth::SynthSpec {
            profile: match args.profile {
                ProfileArg::Flat => synth::Profile::Flat { level: args.row },
                ProfileArg::Parabolic => synth::Profile::Parabolic {
                    level: args.row,
                    depth: args.depth,
                },
            },
            material_intensity: args.material,
            air_intensity: args.air,
            noise_sigma: args.noise,
            texture: (args.texture > 0.0).then_some(synth::Texture::new(args.texture)),
            seed: args.seed + i as u64,
            ..synth::SynthSpec::new(args.width, args.height)
        };
        let scene = synth::synthesize(&spec).map_err(eval_error)?;
        let image = format!("img_{i:03}.png");
        let contour = format!("contour_{i:03}.png");
        let gt = format!("gt_{i:03}.json");
        scene
            .image
            .save_png(&args.out.join(&image))
            .map_err(cost_error)?;
        scene
            .contour
            .save_png(&args.out.join(&contour))
            .map_err(cost_error)?;
        scene
            .ground_truth
            .save_json(&args.out.join(&gt))
            .map_err(eval_error)?;
        let _ = writeln!(manifest, "{image},{contour},{gt},{class}");
    }
    let manifest_path = args.out.join("manifest.csv");
    std::fs::write(&manifest_path, manifest).map_err(|e| io_error(&manifest_path, e))?;
    println!(
        "wrote {} scenes and {}",
        args.count,
        manifest_path.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_flag_documents_a_default_in_help() {
        for sub in ["segment", "sweep", "synth"] {
            let mut cmd = Cli::command();
            let sub_cmd = cmd
                .get_subcommands_mut()
                .find(|c| c.get_name() == sub)
                .unwrap();
            let help = sub_cmd.render_long_help().to_string();
            assert!(
                help.contains("default"),
                "{sub} --help should document defaults:\n{help}"
            );
        }
    }
}
