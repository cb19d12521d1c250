//! Command-line entry point: wires ingestion, relevance computation, the
//! renderer, and analytics behind subcommands.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 data error (broken
//! files, mismatched inputs). Outputs are deterministic for fixed inputs and
//! settings regardless of `--workers`.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::analytics::{
    self, mad_histogram, roi_series, spatial_redundancy, sweep, SweepParam,
};
use crate::config::{NoiseFilter, ReferenceUpdate, SimConfig, SpatialFeature, SrsZeroPolicy};
use crate::error::{Result, SimError};
use crate::frame::crop;
use crate::io::events::{read_events_file, write_events_file};
use crate::io::pgm::write_pgm_file;
use crate::io::sequence::Dataset;
use crate::renderer;
use crate::sim::simulate_sequence;

#[derive(Parser)]
#[command(
    name = "revsim",
    version,
    about = "Region-level event camera simulator",
    max_term_width = 100
)]
struct Cli {
    /// Worker threads for region scoring (default: one per CPU). Never
    /// changes any output byte.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a frame sequence into an event stream plus ROI statistics.
    Simulate(SimulateArgs),
    /// Reconstruct PGM frames from an event stream.
    Render(RenderArgs),
    /// Trace the mean relevant-region fraction across a parameter range.
    Sweep(SweepArgs),
    /// Histogram per-region MAD over a dataset.
    Hist(HistArgs),
    /// Copy a dataset with spatially redundant regions zeroed.
    Export(ExportArgs),
    /// Report the mean fraction of spatially redundant regions.
    Redundancy(RedundancyArgs),
}

/// Simulation settings. Flags mirror the config file keys; a `--config` file
/// overrides the defaults and flags override the file.
#[derive(Args)]
struct ConfigArgs {
    /// Key=value settings file ('#' comments allowed).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Region side length N in pixels.
    #[arg(long)]
    region_size: Option<usize>,

    /// Spatial feature index: edge, corner, mad, or variance.
    #[arg(long, value_parser = SpatialFeature::from_str)]
    feature: Option<SpatialFeature>,

    /// Spatial relevance threshold (score units of the chosen feature).
    #[arg(long)]
    theta_s: Option<f64>,

    /// Temporal relevance threshold (changed pixels per region).
    #[arg(long)]
    theta_t: Option<usize>,

    /// Per-pixel intensity delta for temporal change detection.
    #[arg(long)]
    delta: Option<u8>,

    /// Noise filter applied before scoring: none or median3.
    #[arg(long, value_parser = NoiseFilter::from_str)]
    filter: Option<NoiseFilter>,

    /// Rendering of spatially irrelevant regions: zero or hold.
    #[arg(long, value_parser = SrsZeroPolicy::from_str)]
    policy: Option<SrsZeroPolicy>,

    /// Reference frame update rule: every_frame or on_event.
    #[arg(long, value_parser = ReferenceUpdate::from_str)]
    reference: Option<ReferenceUpdate>,

    /// Gradient magnitude for a pixel to count as an edge point.
    #[arg(long)]
    edge_threshold: Option<u32>,

    /// Corner detector constant k.
    #[arg(long)]
    corner_k: Option<f64>,

    /// Corner detector response threshold.
    #[arg(long)]
    corner_threshold: Option<f64>,
}

impl ConfigArgs {
    fn to_config(&self) -> Result<SimConfig> {
        let mut config = SimConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        if let Some(v) = self.region_size {
            config.region_size = v;
        }
        if let Some(v) = self.feature {
            config.spatial_feature = v;
        }
        if let Some(v) = self.theta_s {
            config.spatial_threshold = v;
        }
        if let Some(v) = self.theta_t {
            config.temporal_threshold = v;
        }
        if let Some(v) = self.delta {
            config.temporal_pixel_delta = v;
        }
        if let Some(v) = self.filter {
            config.noise_filter = v;
        }
        if let Some(v) = self.policy {
            config.srs_zero_policy = v;
        }
        if let Some(v) = self.reference {
            config.reference_update = v;
        }
        if let Some(v) = self.edge_threshold {
            config.edge_gradient_threshold = v;
        }
        if let Some(v) = self.corner_k {
            config.corner_k = v;
        }
        if let Some(v) = self.corner_threshold {
            config.corner_response_threshold = v;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Dataset input: a frame directory or an IDX ubyte image file.
#[derive(Args)]
struct DatasetArgs {
    /// Directory of .pgm/.png images, or an IDX ubyte image file.
    #[arg(long)]
    input: PathBuf,

    /// IDX ubyte label file (IDX image input only).
    #[arg(long)]
    labels: Option<PathBuf>,
}

impl DatasetArgs {
    fn load(&self) -> Result<Dataset> {
        if self.input.is_dir() {
            if self.labels.is_some() {
                return Err(SimError::InvalidConfig(
                    "--labels applies only to IDX image inputs".into(),
                ));
            }
            Dataset::from_dir(&self.input)
        } else {
            Dataset::from_idx(&self.input, self.labels.as_deref())
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Directory of .pgm/.png frames, ordered by file name.
    #[arg(long)]
    input: PathBuf,

    /// Output directory for events.jsonl and roi.csv.
    #[arg(long)]
    out: PathBuf,

    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct RenderArgs {
    /// Event stream produced by `simulate`.
    #[arg(long)]
    events: PathBuf,

    /// Output directory for one PGM per frame.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    dataset: DatasetArgs,

    /// Parameter to sweep: spatial_threshold or region_size.
    #[arg(long, value_parser = SweepParam::from_str)]
    param: SweepParam,

    /// Comma-separated strictly increasing parameter values.
    #[arg(long)]
    values: String,

    /// Treat the input as one temporal sequence instead of independent
    /// images, running the full simulation per value.
    #[arg(long)]
    temporal: bool,

    /// Output directory for sweep.csv.
    #[arg(long)]
    out: PathBuf,

    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct HistArgs {
    #[command(flatten)]
    dataset: DatasetArgs,

    /// Histogram bin width in intensity units.
    #[arg(long, default_value_t = 1.0)]
    bin_width: f64,

    /// Output directory for hist.csv.
    #[arg(long)]
    out: PathBuf,

    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    dataset: DatasetArgs,

    /// Output directory for masked images and manifest.csv.
    #[arg(long)]
    out: PathBuf,

    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct RedundancyArgs {
    #[command(flatten)]
    dataset: DatasetArgs,

    #[command(flatten)]
    config: ConfigArgs,
}

fn verbose(msg: impl FnOnce() -> String) {
    if std::env::var_os("REVSIM_VERBOSE").is_some() {
        eprintln!("{}", msg());
    }
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| SimError::io(path.display().to_string(), e))
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| SimError::io(path.display().to_string(), e))
}

fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| SimError::InvalidConfig(format!("bad sweep value {s:?}")))
        })
        .collect()
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let config = args.config.to_config()?;
    let dataset = Dataset::from_dir(&args.input)?;
    verbose(|| format!("loaded {} frames from {}", dataset.len(), args.input.display()));
    let (header, events) = simulate_sequence(&dataset.frames, &config)?;
    let series = roi_series(&events, header.region_count())?;
    ensure_dir(&args.out)?;
    write_events_file(&args.out.join("events.jsonl"), &header, &events)?;
    let mut roi = create_file(&args.out.join("roi.csv"))?;
    analytics::write_roi_csv(&mut roi, &series)?;
    drop(roi);
    println!("frames {}", series.frames.len());
    println!("regions_per_frame {}", header.region_count());
    println!("mean_roi {:.6}", series.mean_roi());
    println!("mean_nonrelevant {:.6}", series.mean_nonrelevant());
    Ok(())
}

fn cmd_render(args: &RenderArgs) -> Result<()> {
    let (header, events) = read_events_file(&args.events)?;
    if events.is_empty() {
        return Err(SimError::EmptyInput(format!(
            "{} contains no events",
            args.events.display()
        )));
    }
    let grid = header.grid();
    let m = header.region_count();
    ensure_dir(&args.out)?;
    let write_frame = |frame: &crate::frame::Frame| -> Result<()> {
        let out = crop(frame, header.width, header.height);
        write_pgm_file(&args.out.join(format!("{:06}.pgm", frame.t)), &out)
    };
    let mut state = renderer::bootstrap(&events[..m], &grid)?;
    write_frame(state.rendered())?;
    let mut rendered = 1usize;
    for chunk in events[m..].chunks(m) {
        let frame = renderer::render_step(&mut state, chunk, &grid, header.config.srs_zero_policy)?;
        write_frame(&frame)?;
        rendered += 1;
    }
    verbose(|| format!("rendered {rendered} frames to {}", args.out.display()));
    println!("frames {rendered}");
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let config = args.config.to_config()?;
    let values = parse_values(&args.values)?;
    let dataset = args.dataset.load()?;
    let curve = sweep(&dataset, &config, args.param, &values, args.temporal)?;
    ensure_dir(&args.out)?;
    let mut file = create_file(&args.out.join("sweep.csv"))?;
    analytics::write_sweep_csv(&mut file, &curve)?;
    println!("param {}", curve.param);
    println!("points {}", curve.points.len());
    Ok(())
}

fn cmd_hist(args: &HistArgs) -> Result<()> {
    let config = args.config.to_config()?;
    let dataset = args.dataset.load()?;
    let hist = mad_histogram(&dataset, &config, args.bin_width)?;
    ensure_dir(&args.out)?;
    let mut file = create_file(&args.out.join("hist.csv"))?;
    analytics::write_hist_csv(&mut file, &hist)?;
    println!("regions {}", hist.total());
    println!("bins {}", hist.counts.len());
    Ok(())
}

fn cmd_export(args: &ExportArgs) -> Result<()> {
    let config = args.config.to_config()?;
    let dataset = args.dataset.load()?;
    let written = analytics::export_roi_dataset(&dataset, &config, &args.out)?;
    println!("images {written}");
    Ok(())
}

fn cmd_redundancy(args: &RedundancyArgs) -> Result<()> {
    let config = args.config.to_config()?;
    let dataset = args.dataset.load()?;
    let report = spatial_redundancy(&dataset, &config)?;
    println!("images {}", report.per_image.len());
    println!("mean_srs0 {:.6}", report.mean);
    println!("mean_srs1 {:.6}", 1.0 - report.mean);
    Ok(())
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Render(args) => cmd_render(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Hist(args) => cmd_hist(args),
        Command::Export(args) => cmd_export(args),
        Command::Redundancy(args) => cmd_redundancy(args),
    }
}

/// Parse `argv` and run. Returns the process exit code instead of exiting so
/// it stays testable.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; they are not errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.workers {
        Some(0) => Err(SimError::InvalidConfig("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SimError::InvalidConfig(format!("cannot build worker pool: {e}")))
            .and_then(|pool| pool.install(|| dispatch(&cli.command))),
        None => dispatch(&cli.command),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                SimError::InvalidConfig(_) => 1,
                _ => 2,
            }
        }
    }
}
