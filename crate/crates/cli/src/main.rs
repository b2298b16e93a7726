//! csviz: render discretized manipulator C-spaces as radial images and
//! compare renders with pixel metrics and seeded experiments.
//!
//! Exit codes: 0 success, 1 input error (arguments, files, configs),
//! 2 experiment error (rejection budget exhausted, degenerate experiment).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use csviz_core::{
    crop_bottom, generate_scene, mse, negative_subtraction, pixel_setminus, render,
    run_accuracy_experiment, run_subset_experiment, AccuracyReport, Dataset, Error as CoreError,
    ExperimentConfig, FileFormat, ImageSink, PlotMode, RasterImage, RenderConfig, SampleMode,
    WHITE, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(
    name = "csviz",
    version,
    about = "Radial C-space renders of planar manipulators, plus pixel-level comparison tools"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a robot, a random workspace, and a sampled dataset as JSON
    Generate(GenerateArgs),
    /// Render a dataset to a radial C-space image
    Render(RenderArgs),
    /// Subtract two images: writes difference images, prints stats JSON
    Diff(DiffArgs),
    /// Print pixel metrics (mismatch ratio, MSE) for two images
    Metrics(MetricsArgs),
    /// Collision-injection sweep correlating checker and image accuracy
    ExpAccuracy(ExpAccuracyArgs),
    /// Subsampling sweep tracking MSE against the full render
    ExpSubset(ExpSubsetArgs),
}

/// Flags shared by commands driven by an experiment config.
#[derive(Args)]
struct ConfigOpts {
    /// Experiment config JSON; unset fields take defaults
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override the config's base seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of discretization bins per joint
    #[arg(long)]
    nd: Option<usize>,
    /// Override the square plot canvas side, pixels
    #[arg(long)]
    canvas: Option<u32>,
}

impl ConfigOpts {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(nd) = self.nd {
            cfg.n_d = nd;
            cfg.render.n_d = None; // flag beats any render-level pin in the file
        }
        if let Some(canvas) = self.canvas {
            cfg.render.canvas_px = Some(canvas);
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Ppm,
    Png,
}

impl From<FormatArg> for FileFormat {
    fn from(f: FormatArg) -> FileFormat {
        match f {
            FormatArg::Ppm => FileFormat::Ppm,
            FormatArg::Png => FileFormat::Png,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Keep every draw with its collision label
    All,
    /// Keep only collision-free draws
    FreeOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotModeArg {
    /// Plot collision-free samples only
    FreeOnly,
    /// Plot every sample with its normal color
    All,
    /// Plot every sample, collision states in gray
    CollisionGray,
}

impl From<PlotModeArg> for PlotMode {
    fn from(m: PlotModeArg) -> PlotMode {
        match m {
            PlotModeArg::FreeOnly => PlotMode::FreeOnly,
            PlotModeArg::All => PlotMode::All,
            PlotModeArg::CollisionGray => PlotMode::CollisionGray,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    cfg: ConfigOpts,
    /// Which workspace of the config's seeded sequence to emit
    #[arg(long, default_value_t = 0)]
    workspace_index: usize,
    /// Sampling mode for the dataset
    #[arg(long, value_enum, default_value_t = ModeArg::FreeOnly)]
    mode: ModeArg,
    /// Directory for robot.json, workspace.json, dataset.json
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    /// Dataset file (.json, or .csv with header theta_0,...,label)
    dataset: PathBuf,
    /// Render config JSON (layout, palette, epsilon, plot mode)
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override the number of discretization bins per joint
    #[arg(long)]
    nd: Option<usize>,
    /// Override the square plot canvas side, pixels
    #[arg(long)]
    canvas: Option<u32>,
    /// Override which samples are plotted
    #[arg(long, value_enum)]
    mode: Option<PlotModeArg>,
    /// Directory for the rendered image (named after the dataset)
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Ppm)]
    format: FormatArg,
}

#[derive(Args)]
struct DiffArgs {
    /// Image A (left operand)
    a: PathBuf,
    /// Image B (subtracted / compared against)
    b: PathBuf,
    /// Directory for setminus.* and negative.* difference images
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Ppm)]
    format: FormatArg,
    /// Drop the bottom legend rows first: --crop-legend=PX, bare flag drops 80
    #[arg(long, value_name = "PX", num_args = 0..=1, require_equals = true, default_missing_value = "80")]
    crop_legend: Option<u32>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Image A (left operand)
    a: PathBuf,
    /// Image B (subtracted / compared against)
    b: PathBuf,
    /// Drop the bottom legend rows first: --crop-legend=PX, bare flag drops 80
    #[arg(long, value_name = "PX", num_args = 0..=1, require_equals = true, default_missing_value = "80")]
    crop_legend: Option<u32>,
}

#[derive(Args)]
struct ExpAccuracyArgs {
    #[command(flatten)]
    cfg: ConfigOpts,
    /// Directory for the report copy and optional per-step images
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Ppm)]
    format: FormatArg,
    /// Save every reference and injected render into --out-dir
    #[arg(long, requires = "out_dir")]
    save_images: bool,
    /// Repeat the run for n_d in {100, 250, 500, 1000}
    #[arg(long)]
    nd_sweep: bool,
}

#[derive(Args)]
struct ExpSubsetArgs {
    #[command(flatten)]
    cfg: ConfigOpts,
    /// Directory for the report copy and optional per-step images
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Ppm)]
    format: FormatArg,
    /// Save the full and every subset render into --out-dir
    #[arg(long, requires = "out_dir")]
    save_images: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are successes; anything else is an input error.
            let ok = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return ExitCode::from(if ok { 0 } else { 1 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let experiment = err
                .downcast_ref::<CoreError>()
                .is_some_and(CoreError::is_experiment_failure);
            ExitCode::from(if experiment { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Generate(a) => cmd_generate(a),
        Cmd::Render(a) => cmd_render(a),
        Cmd::Diff(a) => cmd_diff(a),
        Cmd::Metrics(a) => cmd_metrics(a),
        Cmd::ExpAccuracy(a) => cmd_exp_accuracy(a),
        Cmd::ExpSubset(a) => cmd_exp_subset(a),
    }
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn load_image(path: &Path) -> Result<RasterImage> {
    RasterImage::load(path).with_context(|| format!("loading image {}", path.display()))
}

#[derive(Serialize)]
struct GenerateOut {
    schema_version: u32,
    workspace_index: usize,
    m: usize,
    free: usize,
    robot: PathBuf,
    workspace: PathBuf,
    dataset: PathBuf,
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let cfg = args.cfg.load()?;
    let mode = match args.mode {
        ModeArg::All => SampleMode::All,
        ModeArg::FreeOnly => SampleMode::FreeOnly,
    };
    let (robot, ws, ds) = generate_scene(&cfg, args.workspace_index, mode)?;

    ensure_dir(&args.out_dir)?;
    let robot_path = args.out_dir.join("robot.json");
    let ws_path = args.out_dir.join("workspace.json");
    let ds_path = args.out_dir.join("dataset.json");
    fs::write(&robot_path, serde_json::to_string_pretty(&robot)?)?;
    fs::write(&ws_path, serde_json::to_string_pretty(&ws)?)?;
    ds.save(&ds_path)?;

    emit(&GenerateOut {
        schema_version: SCHEMA_VERSION,
        workspace_index: args.workspace_index,
        m: ds.m(),
        free: ds.free_count(),
        robot: robot_path,
        workspace: ws_path,
        dataset: ds_path,
    })
}

#[derive(Serialize)]
struct RenderOut {
    schema_version: u32,
    image: PathBuf,
    width: u32,
    height: u32,
}

fn cmd_render(args: RenderArgs) -> Result<()> {
    let ds = Dataset::load(&args.dataset)
        .with_context(|| format!("loading dataset {}", args.dataset.display()))?;
    let mut rc: RenderConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading render config {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing render config {}", path.display()))?
        }
        None => RenderConfig::default(),
    };
    if let Some(nd) = args.nd {
        rc.n_d = Some(nd);
    }
    if let Some(canvas) = args.canvas {
        rc.canvas_px = Some(canvas);
    }
    if let Some(mode) = args.mode {
        rc.mode = Some(mode.into());
    }

    let spec = rc.resolve(ds.n_joints)?;
    let img = render(&ds, &spec)?;

    ensure_dir(&args.out_dir)?;
    let stem = args
        .dataset
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("render");
    let format: FileFormat = args.format.into();
    let path = args.out_dir.join(format!("{stem}.{}", format.extension()));
    img.save(&path)?;

    emit(&RenderOut {
        schema_version: SCHEMA_VERSION,
        image: path,
        width: img.width,
        height: img.height,
    })
}

fn maybe_crop(img: RasterImage, rows: Option<u32>) -> Result<RasterImage> {
    match rows {
        Some(rows) => Ok(crop_bottom(&img, rows)?),
        None => Ok(img),
    }
}

#[derive(Serialize)]
struct DiffOut {
    schema_version: u32,
    nonwhite_before: u64,
    nonwhite_after: u64,
    mismatch_ratio: f64,
    mse: f64,
    setminus_image: PathBuf,
    negative_image: PathBuf,
}

fn cmd_diff(args: DiffArgs) -> Result<()> {
    let a = maybe_crop(load_image(&args.a)?, args.crop_legend)?;
    let b = maybe_crop(load_image(&args.b)?, args.crop_legend)?;

    let (sub, stats) = pixel_setminus(&a, &b, WHITE)?;
    let neg = negative_subtraction(&a, &b)?;
    let mse_value = mse(&a, &b)?;

    ensure_dir(&args.out_dir)?;
    let format: FileFormat = args.format.into();
    let ext = format.extension();
    let sub_path = args.out_dir.join(format!("setminus.{ext}"));
    let neg_path = args.out_dir.join(format!("negative.{ext}"));
    sub.save(&sub_path)?;
    neg.save(&neg_path)?;

    emit(&DiffOut {
        schema_version: SCHEMA_VERSION,
        nonwhite_before: stats.nonwhite_before,
        nonwhite_after: stats.nonwhite_after,
        mismatch_ratio: stats.mismatch_ratio,
        mse: mse_value,
        setminus_image: sub_path,
        negative_image: neg_path,
    })
}

#[derive(Serialize)]
struct MetricsOut {
    schema_version: u32,
    nonwhite_before: u64,
    nonwhite_after: u64,
    mismatch_ratio: f64,
    mse: f64,
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let a = maybe_crop(load_image(&args.a)?, args.crop_legend)?;
    let b = maybe_crop(load_image(&args.b)?, args.crop_legend)?;
    let (_, stats) = pixel_setminus(&a, &b, WHITE)?;
    let mse_value = mse(&a, &b)?;
    emit(&MetricsOut {
        schema_version: SCHEMA_VERSION,
        nonwhite_before: stats.nonwhite_before,
        nonwhite_after: stats.nonwhite_after,
        mismatch_ratio: stats.mismatch_ratio,
        mse: mse_value,
    })
}

/// Write a pretty report JSON file under dir.
fn write_report<T: Serialize>(dir: &Path, name: &str, report: &T) -> Result<()> {
    ensure_dir(dir)?;
    fs::write(dir.join(name), serde_json::to_string_pretty(report)?)?;
    Ok(())
}

#[derive(Serialize)]
struct NdSweepOut {
    schema_version: u32,
    kind: String,
    nd_values: Vec<usize>,
    runs: Vec<AccuracyReport>,
}

fn cmd_exp_accuracy(args: ExpAccuracyArgs) -> Result<()> {
    let cfg = args.cfg.load()?;
    let format: FileFormat = args.format.into();

    if args.nd_sweep {
        let nd_values = vec![100, 250, 500, 1000];
        let mut runs = Vec::with_capacity(nd_values.len());
        for &nd in &nd_values {
            let sub_cfg = ExperimentConfig {
                n_d: nd,
                render: RenderConfig { n_d: None, ..cfg.render.clone() },
                ..cfg.clone()
            };
            let sub_dir = args
                .out_dir
                .as_ref()
                .map(|d| d.join(format!("nd-{nd}")))
                .filter(|_| args.save_images);
            if let Some(dir) = &sub_dir {
                ensure_dir(dir)?;
            }
            let sink = sub_dir.as_ref().map(|dir| ImageSink { dir, format });
            runs.push(run_accuracy_experiment(&sub_cfg, sink.as_ref())?);
        }
        let out = NdSweepOut {
            schema_version: SCHEMA_VERSION,
            kind: "accuracy-nd-sweep".into(),
            nd_values,
            runs,
        };
        if let Some(dir) = &args.out_dir {
            write_report(dir, "accuracy-nd-sweep.json", &out)?;
        }
        return emit(&out);
    }

    let sink_dir = args.out_dir.as_ref().filter(|_| args.save_images);
    if let Some(dir) = sink_dir {
        ensure_dir(dir)?;
    }
    let sink = sink_dir.map(|dir| ImageSink { dir: dir.as_path(), format });
    let report = run_accuracy_experiment(&cfg, sink.as_ref())?;
    if let Some(dir) = &args.out_dir {
        write_report(dir, "accuracy-report.json", &report)?;
    }
    emit(&report)
}

fn cmd_exp_subset(args: ExpSubsetArgs) -> Result<()> {
    let cfg = args.cfg.load()?;
    let format: FileFormat = args.format.into();
    let sink_dir = args.out_dir.as_ref().filter(|_| args.save_images);
    if let Some(dir) = sink_dir {
        ensure_dir(dir)?;
    }
    let sink = sink_dir.map(|dir| ImageSink { dir: dir.as_path(), format });
    let report = run_subset_experiment(&cfg, sink.as_ref())?;
    if let Some(dir) = &args.out_dir {
        write_report(dir, "subset-report.json", &report)?;
    }
    emit(&report)
}
