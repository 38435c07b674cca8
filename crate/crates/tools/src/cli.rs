//! The `sara` command line: rank, evaluate, heatmap, aoi, and stats
//! subcommands.
//!
//! Every subcommand accepts `--config <file>` pointing at a JSON object
//! whose keys match the long flag names; explicit flags override the file,
//! which overrides built-in defaults. Each run prints the resolved
//! configuration as one JSON object on stdout and writes its artifacts to
//! `--out`. Runs are deterministic: identical inputs, flags, and seed
//! produce bitwise-identical output files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sara_core::aoi::{attention_shift_report, AoiConfig};
use sara_core::gaze::{detect_fixations, FixationConfig, GazeLog, SampleKind};
use sara_core::heatmap::{build_heatmap, heatmap_from_samples, WeightedPoint};
use sara_core::normalize::normalize_map;
use sara_core::sara::rank_masks;
use sara_core::spectral::spectral_residual_saliency;
use sara_core::stats::{demographic_report, AgeBins, DemographicConfig};
use sara_core::{DepthMap, GridConfig, NormalizeConfig, ScoreWeights};
use serde::{Deserialize, Serialize};

use crate::eval::{evaluate_dataset, EvalOptions};
use crate::gazefile::load_gaze_logs;
use crate::manifest::load_manifest;
use crate::overlay::{render_overlay, OverlayBase};
use crate::raster;

#[derive(Parser)]
#[command(
    name = "sara",
    version,
    about = "Saliency ranking and visual attention analytics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank interface elements of one image by saliency.
    Rank(RankArgs),
    /// Score ranking agreement (SOR) over a dataset manifest.
    Evaluate(EvaluateArgs),
    /// Render an attention heatmap from gaze or mouse logs.
    Heatmap(HeatmapArgs),
    /// Compare attention on an area of interest between groups.
    Aoi(AoiArgs),
    /// Demographic coordinate statistics across age bins.
    Stats(StatsArgs),
}

/// Runs the CLI against the process arguments.
pub fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Rank(args) => cmd_rank(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Heatmap(args) => cmd_heatmap(args),
        Command::Aoi(args) => cmd_aoi(args),
        Command::Stats(args) => cmd_stats(args),
    }
}

/// Reads an optional JSON config file, rejecting keys that match no flag.
fn read_config_file<T: for<'de> Deserialize<'de> + Default>(
    path: Option<&Path>,
    allowed: &[&str],
) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text =
                fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", p.display()))?;
            let obj = value
                .as_object()
                .with_context(|| format!("config {} must be a JSON object", p.display()))?;
            for key in obj.keys() {
                if !allowed.contains(&key.as_str()) {
                    bail!(
                        "config {}: unknown key {key:?} (allowed: {})",
                        p.display(),
                        allowed.join(", ")
                    );
                }
            }
            serde_json::from_value(value).with_context(|| format!("in config {}", p.display()))
        }
    }
}

const SCORING_KEYS: [&str; 9] = [
    "k",
    "w-entropy",
    "w-saliency",
    "w-center",
    "w-depth",
    "normalize",
    "norm-kernel",
    "norm-sigma",
    "norm-divisor",
];

fn with_scoring_keys(extra: &[&'static str]) -> Vec<&'static str> {
    let mut keys = extra.to_vec();
    keys.extend(SCORING_KEYS);
    keys
}

fn echo_config<T: Serialize>(config: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(config)?);
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

// ---------------------------------------------------------------- rank --

/// Grid, weight, and normalization flags shared by `rank` and `evaluate`.
#[derive(Args)]
struct ScoringFlags {
    /// Grid resolution (k x k segments).
    #[arg(long)]
    k: Option<usize>,
    /// Weight of segment histogram entropy.
    #[arg(long)]
    w_entropy: Option<f64>,
    /// Weight of mean segment saliency.
    #[arg(long)]
    w_saliency: Option<f64>,
    /// Weight of the center-bias prior.
    #[arg(long)]
    w_center: Option<f64>,
    /// Weight of mean segment depth (needs --depth).
    #[arg(long)]
    w_depth: Option<f64>,
    /// Smooth, contrast-stretch, and quantize the map before ranking.
    #[arg(long)]
    normalize: bool,
    /// Normalization Gaussian kernel size (odd).
    #[arg(long)]
    norm_kernel: Option<usize>,
    /// Normalization Gaussian sigma.
    #[arg(long)]
    norm_sigma: Option<f64>,
    /// Normalization intensity divisor.
    #[arg(long)]
    norm_divisor: Option<u8>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct ScoringFile {
    k: Option<usize>,
    w_entropy: Option<f64>,
    w_saliency: Option<f64>,
    w_center: Option<f64>,
    w_depth: Option<f64>,
    normalize: Option<bool>,
    norm_kernel: Option<usize>,
    norm_sigma: Option<f64>,
    norm_divisor: Option<u8>,
}

fn resolve_scoring(flags: &ScoringFlags, file: &ScoringFile) -> (GridConfig, Option<NormalizeConfig>) {
    let defaults = GridConfig::default();
    let grid = GridConfig {
        k: flags.k.or(file.k).unwrap_or(defaults.k),
        weights: ScoreWeights {
            entropy: flags
                .w_entropy
                .or(file.w_entropy)
                .unwrap_or(defaults.weights.entropy),
            saliency: flags
                .w_saliency
                .or(file.w_saliency)
                .unwrap_or(defaults.weights.saliency),
            center_bias: flags
                .w_center
                .or(file.w_center)
                .unwrap_or(defaults.weights.center_bias),
            depth: flags
                .w_depth
                .or(file.w_depth)
                .unwrap_or(defaults.weights.depth),
        },
    };
    let enabled = flags.normalize || file.normalize.unwrap_or(false);
    let normalize = enabled.then(|| {
        let d = NormalizeConfig::default();
        NormalizeConfig {
            kernel_size: flags.norm_kernel.or(file.norm_kernel).unwrap_or(d.kernel_size),
            sigma: flags.norm_sigma.or(file.norm_sigma).unwrap_or(d.sigma),
            divisor: flags.norm_divisor.or(file.norm_divisor).unwrap_or(d.divisor),
            ..d
        }
    });
    (grid, normalize)
}

#[derive(Args)]
struct RankArgs {
    /// Screenshot of the interface (PNG).
    image: PathBuf,
    /// Precomputed backbone saliency map (grayscale PNG).
    #[arg(long, conflicts_with = "builtin")]
    saliency: Option<PathBuf>,
    /// Compute the built-in spectral saliency map from the screenshot.
    #[arg(long)]
    builtin: bool,
    /// Directory of binary element masks (one PNG per element).
    #[arg(long)]
    masks: Option<PathBuf>,
    /// Depth map (grayscale PNG, bright = near).
    #[arg(long)]
    depth: Option<PathBuf>,
    #[command(flatten)]
    scoring: ScoringFlags,
    /// Output directory for ranks.json and overlay.png.
    #[arg(long)]
    out: PathBuf,
    /// JSON config file; keys match the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct RankFile {
    saliency: Option<PathBuf>,
    builtin: Option<bool>,
    masks: Option<PathBuf>,
    depth: Option<PathBuf>,
    #[serde(flatten)]
    scoring: ScoringFile,
}

/// Resolved `rank` configuration, echoed into the report.
#[derive(Serialize)]
struct RankConfig {
    image: PathBuf,
    backbone: String,
    saliency: Option<PathBuf>,
    masks: PathBuf,
    depth: Option<PathBuf>,
    grid: GridConfig,
    normalize: Option<NormalizeConfig>,
}

#[derive(Serialize)]
struct RankReport<'a> {
    config: &'a RankConfig,
    ranks: &'a [sara_core::RankEntry],
}

fn cmd_rank(args: RankArgs) -> Result<()> {
    let file: RankFile = read_config_file(
        args.config.as_deref(),
        &with_scoring_keys(&["saliency", "builtin", "masks", "depth"]),
    )?;
    let saliency_path = args.saliency.or(file.saliency);
    let builtin = args.builtin || file.builtin.unwrap_or(false);
    if saliency_path.is_some() == builtin {
        bail!("pick exactly one backbone: --saliency <path> or --builtin");
    }
    let masks_dir = args
        .masks
        .or(file.masks)
        .context("--masks <dir> is required")?;
    let depth_path = args.depth.or(file.depth);
    let (grid, normalize) = resolve_scoring(&args.scoring, &file.scoring);

    let (width, height, rgb) = raster::load_rgb(&args.image)?;
    let mut map = match &saliency_path {
        Some(path) => {
            let loaded = raster::load_saliency_map(path, width, height)?;
            if loaded.converted_from_color {
                eprintln!(
                    "warning: {} is not grayscale; converted via Rec. 601 luma",
                    path.display()
                );
            }
            loaded.map
        }
        None => spectral_residual_saliency(width, height, &rgb)?,
    };
    if let Some(cfg) = &normalize {
        map = normalize_map(&map, cfg)?;
    }
    let depth: Option<DepthMap> = match &depth_path {
        Some(path) => Some(raster::load_depth_map(path, width, height)?.0),
        None => None,
    };
    let (masks, warnings) = raster::load_masks_dir(&masks_dir, width, height)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let ranks = rank_masks(&map, &grid, &masks, depth.as_ref())?;

    let config = RankConfig {
        image: args.image,
        backbone: if builtin { "builtin".into() } else { "file".into() },
        saliency: saliency_path,
        masks: masks_dir,
        depth: depth_path,
        grid,
        normalize,
    };
    ensure_out_dir(&args.out)?;
    write_json(
        &args.out.join("ranks.json"),
        &RankReport {
            config: &config,
            ranks: ranks.entries(),
        },
    )?;
    let overlay = render_overlay(
        &OverlayBase::Rgb {
            width,
            height,
            data: &rgb,
        },
        &masks,
        &ranks,
    )?;
    raster::save_rgb_png(&args.out.join("overlay.png"), width, height, overlay)?;
    echo_config(&config)
}

// ------------------------------------------------------------ evaluate --

#[derive(Args)]
struct EvaluateArgs {
    /// Dataset manifest (JSON array of image entries).
    manifest: PathBuf,
    #[command(flatten)]
    scoring: ScoringFlags,
    /// Also score shuffled AUC against the other images' fixations.
    #[arg(long)]
    sauc: bool,
    /// Seed for shuffled-AUC negative sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for eval.json and eval.csv.
    #[arg(long)]
    out: PathBuf,
    /// JSON config file; keys match the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct EvaluateFile {
    sauc: Option<bool>,
    seed: Option<u64>,
    #[serde(flatten)]
    scoring: ScoringFile,
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let file: EvaluateFile =
        read_config_file(args.config.as_deref(), &with_scoring_keys(&["sauc", "seed"]))?;
    let (grid, normalize) = resolve_scoring(&args.scoring, &file.scoring);
    let opts = EvalOptions {
        grid,
        normalize,
        sauc: args.sauc || file.sauc.unwrap_or(false),
        seed: args.seed.or(file.seed).unwrap_or(0),
    };
    let entries = load_manifest(&args.manifest)?;
    let report = evaluate_dataset(&entries, &opts);
    ensure_out_dir(&args.out)?;
    write_json(&args.out.join("eval.json"), &report)?;
    fs::write(args.out.join("eval.csv"), report.to_csv()?)
        .with_context(|| format!("writing {}", args.out.join("eval.csv").display()))?;
    for row in &report.images {
        if let Some(detail) = &row.detail {
            eprintln!("{}: {detail}", row.id);
        }
    }
    echo_config(&report.config)
}

// ------------------------------------------------------------- heatmap --

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum WeightMode {
    /// Fixations weighted by their duration.
    Duration,
    /// Every fixation counts once.
    Count,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindFilter {
    Gaze,
    Mouse,
    Click,
    All,
}

impl KindFilter {
    fn kinds(self) -> Vec<SampleKind> {
        match self {
            KindFilter::Gaze => vec![SampleKind::Gaze],
            KindFilter::Mouse => vec![SampleKind::Mouse],
            KindFilter::Click => vec![SampleKind::Click],
            KindFilter::All => vec![SampleKind::Gaze, SampleKind::Mouse, SampleKind::Click],
        }
    }
}

#[derive(Args)]
struct HeatmapArgs {
    /// Gaze-log JSON file or directory.
    #[arg(long)]
    logs: PathBuf,
    /// Heatmap width in pixels.
    #[arg(long)]
    width: Option<usize>,
    /// Heatmap height in pixels.
    #[arg(long)]
    height: Option<usize>,
    /// Gaussian kernel sigma in pixels.
    #[arg(long)]
    sigma: Option<f64>,
    /// Fixation weighting.
    #[arg(long, value_enum)]
    weight: Option<WeightMode>,
    /// Skip fixation detection and splat raw on-screen samples instead.
    #[arg(long)]
    from_samples: bool,
    /// Sample kinds to include.
    #[arg(long, value_enum)]
    kind: Option<KindFilter>,
    /// Only use logs recorded on this stimulus image.
    #[arg(long)]
    image: Option<String>,
    /// Fixation dispersion threshold in pixels.
    #[arg(long)]
    dispersion: Option<f64>,
    /// Minimum fixation duration in milliseconds.
    #[arg(long)]
    min_duration: Option<f64>,
    /// Output PNG path.
    #[arg(long)]
    out: PathBuf,
    /// JSON config file; keys match the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct HeatmapFile {
    width: Option<usize>,
    height: Option<usize>,
    sigma: Option<f64>,
    weight: Option<WeightMode>,
    from_samples: Option<bool>,
    kind: Option<KindFilter>,
    image: Option<String>,
    dispersion: Option<f64>,
    min_duration: Option<f64>,
}

#[derive(Serialize)]
struct HeatmapConfig {
    logs: PathBuf,
    width: usize,
    height: usize,
    sigma: f64,
    weight: WeightMode,
    from_samples: bool,
    kind: KindFilter,
    image: Option<String>,
    fixation: FixationConfig,
}

/// Logs restricted to one stimulus image, when a filter is given.
fn filter_image(logs: Vec<GazeLog>, image: Option<&str>) -> Vec<GazeLog> {
    match image {
        None => logs,
        Some(id) => logs.into_iter().filter(|l| l.image == id).collect(),
    }
}

fn cmd_heatmap(args: HeatmapArgs) -> Result<()> {
    let file: HeatmapFile = read_config_file(
        args.config.as_deref(),
        &[
            "width",
            "height",
            "sigma",
            "weight",
            "from-samples",
            "kind",
            "image",
            "dispersion",
            "min-duration",
        ],
    )?;
    let fix_defaults = FixationConfig::default();
    let config = HeatmapConfig {
        logs: args.logs,
        width: args.width.or(file.width).context("--width is required")?,
        height: args.height.or(file.height).context("--height is required")?,
        sigma: args.sigma.or(file.sigma).unwrap_or(25.0),
        weight: args.weight.or(file.weight).unwrap_or(WeightMode::Duration),
        from_samples: args.from_samples || file.from_samples.unwrap_or(false),
        kind: args.kind.or(file.kind).unwrap_or(KindFilter::All),
        image: args.image.or(file.image),
        fixation: FixationConfig {
            dispersion_px: args
                .dispersion
                .or(file.dispersion)
                .unwrap_or(fix_defaults.dispersion_px),
            min_duration_ms: args
                .min_duration
                .or(file.min_duration)
                .unwrap_or(fix_defaults.min_duration_ms),
        },
    };

    let logs = filter_image(load_gaze_logs(&config.logs)?, config.image.as_deref());
    let kinds = config.kind.kinds();
    let map = if config.from_samples {
        let samples: Vec<_> = logs
            .iter()
            .flat_map(|l| l.samples_of_kind(&kinds))
            .collect();
        heatmap_from_samples(&samples, config.width, config.height, config.sigma)?
    } else {
        let mut points = Vec::new();
        for log in &logs {
            let samples = log.samples_of_kind(&kinds);
            for f in detect_fixations(&samples, &config.fixation)? {
                points.push(WeightedPoint {
                    x: f.x,
                    y: f.y,
                    weight: match config.weight {
                        WeightMode::Duration => f.duration_ms,
                        WeightMode::Count => 1.0,
                    },
                });
            }
        }
        build_heatmap(&points, config.width, config.height, config.sigma)?
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_out_dir(parent)?;
    }
    raster::save_gray_png(&args.out, &map)?;
    echo_config(&config)
}

// ----------------------------------------------------------------- aoi --

#[derive(Args)]
struct AoiArgs {
    /// Control-group gaze-log JSON file or directory.
    #[arg(long)]
    ctrl_logs: PathBuf,
    /// Experimental-group gaze-log JSON file or directory.
    #[arg(long)]
    expr_logs: PathBuf,
    /// Binary mask PNG naming the area of interest.
    #[arg(long)]
    aoi: PathBuf,
    /// Saliency rank of the AOI in the control interface.
    #[arg(long)]
    rank_ctrl: Option<usize>,
    /// Saliency rank of the AOI in the experimental interface.
    #[arg(long)]
    rank_expr: Option<usize>,
    /// Viewing duration per image in milliseconds.
    #[arg(long)]
    viewing_ms: Option<f64>,
    /// Only use logs recorded on this stimulus image.
    #[arg(long)]
    image: Option<String>,
    /// Fixation dispersion threshold in pixels.
    #[arg(long)]
    dispersion: Option<f64>,
    /// Minimum fixation duration in milliseconds.
    #[arg(long)]
    min_duration: Option<f64>,
    /// Output directory for aoi.json and aoi.csv.
    #[arg(long)]
    out: PathBuf,
    /// JSON config file; keys match the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct AoiFile {
    rank_ctrl: Option<usize>,
    rank_expr: Option<usize>,
    viewing_ms: Option<f64>,
    image: Option<String>,
    dispersion: Option<f64>,
    min_duration: Option<f64>,
}

#[derive(Serialize)]
struct AoiCliConfig {
    ctrl_logs: PathBuf,
    expr_logs: PathBuf,
    aoi: PathBuf,
    rank_ctrl: Option<usize>,
    rank_expr: Option<usize>,
    image: Option<String>,
    #[serde(flatten)]
    aoi_config: AoiConfig,
}

fn metric_cell(v: f64) -> String {
    v.to_string()
}

fn cmd_aoi(args: AoiArgs) -> Result<()> {
    let file: AoiFile = read_config_file(
        args.config.as_deref(),
        &[
            "rank-ctrl",
            "rank-expr",
            "viewing-ms",
            "image",
            "dispersion",
            "min-duration",
        ],
    )?;
    let defaults = AoiConfig::default();
    let fix_defaults = FixationConfig::default();
    let aoi_config = AoiConfig {
        viewing_duration_ms: args
            .viewing_ms
            .or(file.viewing_ms)
            .unwrap_or(defaults.viewing_duration_ms),
        fixation: FixationConfig {
            dispersion_px: args
                .dispersion
                .or(file.dispersion)
                .unwrap_or(fix_defaults.dispersion_px),
            min_duration_ms: args
                .min_duration
                .or(file.min_duration)
                .unwrap_or(fix_defaults.min_duration_ms),
        },
    };
    let config = AoiCliConfig {
        ctrl_logs: args.ctrl_logs,
        expr_logs: args.expr_logs,
        aoi: args.aoi,
        rank_ctrl: args.rank_ctrl.or(file.rank_ctrl),
        rank_expr: args.rank_expr.or(file.rank_expr),
        image: args.image.or(file.image),
        aoi_config,
    };

    let ctrl = filter_image(load_gaze_logs(&config.ctrl_logs)?, config.image.as_deref());
    let expr = filter_image(load_gaze_logs(&config.expr_logs)?, config.image.as_deref());
    let loaded = raster::load_gray(&config.aoi)?;
    let id = config
        .aoi
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("aoi");
    let mask = sara_core::ElementMask::new(
        id,
        loaded.map.width(),
        loaded.map.height(),
        loaded.map.values().iter().map(|&v| v > 0).collect(),
    )?;
    let report = attention_shift_report(
        &ctrl,
        &expr,
        &mask,
        config.rank_ctrl,
        config.rank_expr,
        &config.aoi_config,
    )?;

    ensure_out_dir(&args.out)?;
    #[derive(Serialize)]
    struct AoiOutput<'a> {
        config: &'a AoiCliConfig,
        report: &'a sara_core::aoi::AoiReport,
    }
    write_json(
        &args.out.join("aoi.json"),
        &AoiOutput {
            config: &config,
            report: &report,
        },
    )?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "ctrl", "expr", "winner"])?;
    let opt = |v: Option<f64>| v.map(metric_cell).unwrap_or_default();
    let rank_cell = |v: Option<usize>| v.map(|r| r.to_string()).unwrap_or_default();
    let rows = [
        (
            "time_viewed_pct",
            metric_cell(report.ctrl.time_viewed_pct),
            metric_cell(report.expr.time_viewed_pct),
            report.winners.time_viewed,
        ),
        (
            "avg_fixations",
            metric_cell(report.ctrl.avg_fixations),
            metric_cell(report.expr.avg_fixations),
            report.winners.avg_fixations,
        ),
        (
            "revisitors_pct",
            metric_cell(report.ctrl.revisitors_pct),
            metric_cell(report.expr.revisitors_pct),
            report.winners.revisitors,
        ),
        (
            "avg_revisits",
            metric_cell(report.ctrl.avg_revisits),
            metric_cell(report.expr.avg_revisits),
            report.winners.avg_revisits,
        ),
        (
            "avg_first_view_s",
            opt(report.ctrl.avg_first_view_s),
            opt(report.expr.avg_first_view_s),
            report.winners.first_view,
        ),
        (
            "sara_rank",
            rank_cell(report.sara_rank_ctrl),
            rank_cell(report.sara_rank_expr),
            report.winners.sara_rank,
        ),
    ];
    for (metric, ctrl, expr, winner) in rows {
        let winner = match winner {
            sara_core::aoi::MetricWinner::Ctrl => "CTRL",
            sara_core::aoi::MetricWinner::Expr => "EXPR",
            sara_core::aoi::MetricWinner::Tie => "TIE",
        };
        w.write_record([metric, &ctrl, &expr, winner])?;
    }
    fs::write(args.out.join("aoi.csv"), String::from_utf8(w.into_inner()?)?)
        .with_context(|| format!("writing {}", args.out.join("aoi.csv").display()))?;
    echo_config(&config)
}

// --------------------------------------------------------------- stats --

#[derive(Args)]
struct StatsArgs {
    /// Gaze-log JSON file or directory.
    #[arg(long)]
    logs: PathBuf,
    /// Only analyze this stimulus image (default: every image found).
    #[arg(long)]
    image: Option<String>,
    /// Significance level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Age bins as "lo-hi,lo-hi,..." (default "13-20,21-35,36-50,51-70").
    #[arg(long)]
    bins: Option<String>,
    /// Use every on-screen sample instead of clicks only.
    #[arg(long)]
    all_samples: bool,
    /// Output directory for stats.json and stats.csv.
    #[arg(long)]
    out: PathBuf,
    /// JSON config file; keys match the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct StatsFile {
    image: Option<String>,
    alpha: Option<f64>,
    bins: Option<String>,
    all_samples: Option<bool>,
}

#[derive(Serialize)]
struct StatsCliConfig {
    logs: PathBuf,
    image: Option<String>,
    alpha: f64,
    bins: Vec<String>,
    clicks_only: bool,
}

/// Parses "13-20,21-35" into age bin ranges.
fn parse_bins(spec: &str) -> Result<AgeBins> {
    let mut ranges = Vec::new();
    for part in spec.split(',') {
        let (lo, hi) = part
            .trim()
            .split_once('-')
            .with_context(|| format!("bin {part:?} is not lo-hi"))?;
        let lo: u32 = lo.trim().parse().with_context(|| format!("bin {part:?}"))?;
        let hi: u32 = hi.trim().parse().with_context(|| format!("bin {part:?}"))?;
        ranges.push((lo, hi));
    }
    Ok(AgeBins::new(ranges)?)
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let file: StatsFile = read_config_file(
        args.config.as_deref(),
        &["image", "alpha", "bins", "all-samples"],
    )?;
    let alpha = args.alpha.or(file.alpha).unwrap_or(0.05);
    let bins = match args.bins.or(file.bins) {
        Some(spec) => parse_bins(&spec)?,
        None => AgeBins::default(),
    };
    let clicks_only = !(args.all_samples || file.all_samples.unwrap_or(false));
    let image = args.image.or(file.image);
    let cfg = DemographicConfig {
        bins: bins.clone(),
        alpha,
        clicks_only,
    };
    let config = StatsCliConfig {
        logs: args.logs,
        image: image.clone(),
        alpha,
        bins: (0..bins.ranges().len()).map(|i| bins.label(i)).collect(),
        clicks_only,
    };

    let logs = load_gaze_logs(&config.logs)?;
    let images: Vec<String> = match image {
        Some(id) => vec![id],
        None => {
            let mut ids: Vec<String> = logs.iter().map(|l| l.image.clone()).collect();
            ids.sort();
            ids.dedup();
            ids
        }
    };
    let mut reports = Vec::with_capacity(images.len());
    for id in &images {
        let report = demographic_report(&logs, id, &cfg)
            .with_context(|| format!("analyzing image {id}"))?;
        for w in report.x.warnings.iter().chain(report.y.warnings.iter()) {
            eprintln!("{id}: {w}");
        }
        reports.push(report);
    }

    ensure_out_dir(&args.out)?;
    #[derive(Serialize)]
    struct StatsOutput<'a> {
        config: &'a StatsCliConfig,
        reports: &'a [sara_core::stats::DemographicReport],
    }
    write_json(
        &args.out.join("stats.json"),
        &StatsOutput {
            config: &config,
            reports: &reports,
        },
    )?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "image", "group", "p_x", "eps2_x", "sig_x", "p_y", "eps2_y", "sig_y",
    ])?;
    for report in &reports {
        let axis = |outcome: &sara_core::stats::AxisOutcome| -> (String, String, String) {
            match &outcome.kruskal_wallis {
                Some(t) => (
                    t.p_value.to_string(),
                    t.effect_size.map(|e| e.to_string()).unwrap_or_default(),
                    t.significant.to_string(),
                ),
                None => (String::new(), String::new(), String::new()),
            }
        };
        let (px, ex, sx) = axis(&report.x);
        let (py, ey, sy) = axis(&report.y);
        let group = report.group.map(|g| g.as_str()).unwrap_or("MIXED");
        w.write_record([report.image.as_str(), group, &px, &ex, &sx, &py, &ey, &sy])?;
    }
    fs::write(
        args.out.join("stats.csv"),
        String::from_utf8(w.into_inner()?)?,
    )
    .with_context(|| format!("writing {}", args.out.join("stats.csv").display()))?;
    echo_config(&config)
}
