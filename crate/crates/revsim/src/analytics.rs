//! Redundancy measurements and CSV reports derived from event streams and
//! image datasets: ROI time series, spatial redundancy rates, parameter
//! sweeps, MAD histograms, and ROI-masked dataset export.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::event::RegionEvent;
use crate::features;
use crate::frame::{build_grid, crop, pad_to_grid, Frame, RegionGrid};
use crate::io::pgm::write_pgm_file;
use crate::io::sequence::Dataset;
use crate::rcm::{denoise, spatial_scores};
use crate::sim::simulate_sequence;

/// Relevance tallies for one frame of an event stream.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiFrame {
    pub t: u32,
    pub active: usize,
    pub srs1: usize,
    pub trs1: usize,
    pub roi_fraction: f64,
}

/// Per-frame ROI statistics for a whole stream.
#[derive(Debug, Clone)]
pub struct RoiSeries {
    pub region_count: usize,
    pub frames: Vec<RoiFrame>,
}

impl RoiSeries {
    /// Mean fraction of active (relevant) regions over the whole stream.
    pub fn mean_roi(&self) -> f64 {
        let total: usize = self.frames.iter().map(|f| f.active).sum();
        total as f64 / (self.frames.len() * self.region_count) as f64
    }

    /// Mean fraction of non-relevant regions: the exact complement of
    /// [`RoiSeries::mean_roi`].
    pub fn mean_nonrelevant(&self) -> f64 {
        1.0 - self.mean_roi()
    }
}

/// Tally relevance bits frame by frame. The stream must be complete: one
/// event per region per frame, in stream order.
pub fn roi_series(events: &[RegionEvent], region_count: usize) -> Result<RoiSeries> {
    if region_count == 0 {
        return Err(SimError::InvalidConfig(
            "region count must be positive".into(),
        ));
    }
    if events.is_empty() {
        return Err(SimError::EmptyInput("event stream has no frames".into()));
    }
    if !events.len().is_multiple_of(region_count) {
        return Err(SimError::StreamCorruption(format!(
            "{} events do not fill whole frames of {} regions",
            events.len(),
            region_count
        )));
    }
    let mut frames = Vec::with_capacity(events.len() / region_count);
    for chunk in events.chunks_exact(region_count) {
        let t = chunk[0].t;
        if chunk.iter().any(|e| e.t != t) {
            return Err(SimError::StreamCorruption(format!(
                "frame {t} is incomplete"
            )));
        }
        let active = chunk.iter().filter(|e| e.active()).count();
        frames.push(RoiFrame {
            t,
            active,
            srs1: chunk.iter().filter(|e| e.bits.srs).count(),
            trs1: chunk.iter().filter(|e| e.bits.trs).count(),
            roi_fraction: active as f64 / region_count as f64,
        });
    }
    Ok(RoiSeries {
        region_count,
        frames,
    })
}

/// Common entry check for dataset analytics: a validated config and one grid
/// that fits every image.
fn uniform_grid(dataset: &Dataset, config: &SimConfig) -> Result<RegionGrid> {
    config.validate()?;
    let first = dataset
        .frames
        .first()
        .ok_or_else(|| SimError::EmptyInput("dataset has no images".into()))?;
    for f in &dataset.frames {
        if f.width != first.width || f.height != first.height {
            return Err(SimError::DimensionMismatch {
                expected_width: first.width,
                expected_height: first.height,
                width: f.width,
                height: f.height,
            });
        }
    }
    Ok(build_grid(first.width, first.height, config.region_size))
}

/// Spatial scores for every region of every image, images in dataset order.
fn dataset_scores(dataset: &Dataset, config: &SimConfig) -> Result<(usize, Vec<Vec<f64>>)> {
    let grid = uniform_grid(dataset, config)?;
    let scores = dataset
        .frames
        .par_iter()
        .map(|frame| -> Result<Vec<f64>> {
            let padded = pad_to_grid(frame, &grid)?;
            let clean = denoise(&padded, config.noise_filter);
            Ok(spatial_scores(&clean, &grid, config))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((grid.region_count(), scores))
}

/// Fraction of spatially redundant (srs=0) regions, per image and averaged.
#[derive(Debug, Clone)]
pub struct SpatialRedundancy {
    pub per_image: Vec<f64>,
    pub mean: f64,
}

/// Score each image independently (no temporal path) and report how many
/// regions fall below the spatial threshold.
pub fn spatial_redundancy(dataset: &Dataset, config: &SimConfig) -> Result<SpatialRedundancy> {
    let (m, scores) = dataset_scores(dataset, config)?;
    let per_image: Vec<f64> = scores
        .iter()
        .map(|s| s.iter().filter(|&&v| v < config.spatial_threshold).count() as f64 / m as f64)
        .collect();
    let mean = per_image.iter().sum::<f64>() / per_image.len() as f64;
    Ok(SpatialRedundancy { per_image, mean })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    SpatialThreshold,
    RegionSize,
}

impl FromStr for SweepParam {
    type Err = SimError;

    fn from_str(s: &str) -> Result<SweepParam> {
        match s {
            "spatial_threshold" => Ok(SweepParam::SpatialThreshold),
            "region_size" => Ok(SweepParam::RegionSize),
            _ => Err(SimError::InvalidConfig(format!(
                "unknown sweep parameter {s:?} (expected spatial_threshold or region_size)"
            ))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::SpatialThreshold => "spatial_threshold",
            SweepParam::RegionSize => "region_size",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub mean_roi: f64,
}

#[derive(Debug, Clone)]
pub struct SweepCurve {
    pub param: SweepParam,
    pub points: Vec<SweepPoint>,
}

/// Mean relevant-region fraction at each parameter value. With `temporal`
/// set, the dataset is treated as one frame sequence and the full simulation
/// runs per value; otherwise images are scored independently on the spatial
/// path alone. Values must be strictly increasing.
pub fn sweep(
    dataset: &Dataset,
    config: &SimConfig,
    param: SweepParam,
    values: &[f64],
    temporal: bool,
) -> Result<SweepCurve> {
    if values.is_empty() {
        return Err(SimError::InvalidConfig(
            "sweep needs at least one value".into(),
        ));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SimError::InvalidConfig(
            "sweep values must be strictly increasing".into(),
        ));
    }
    for &v in values {
        if !v.is_finite() || v < 0.0 {
            return Err(SimError::InvalidConfig(format!(
                "sweep value {v} is not usable"
            )));
        }
        if param == SweepParam::RegionSize && (v.fract() != 0.0 || v < 1.0) {
            return Err(SimError::InvalidConfig(format!(
                "region size sweep values must be whole numbers >= 1, got {v}"
            )));
        }
    }
    let with_value = |v: f64| match param {
        SweepParam::SpatialThreshold => SimConfig {
            spatial_threshold: v,
            ..config.clone()
        },
        SweepParam::RegionSize => SimConfig {
            region_size: v as usize,
            ..config.clone()
        },
    };
    let points = match (param, temporal) {
        (SweepParam::SpatialThreshold, false) => {
            // One scoring pass serves every threshold.
            let (m, scores) = dataset_scores(dataset, config)?;
            let total = (scores.len() * m) as f64;
            values
                .iter()
                .map(|&theta| {
                    let relevant: usize = scores
                        .iter()
                        .map(|s| s.iter().filter(|&&v| v >= theta).count())
                        .sum();
                    SweepPoint {
                        value: theta,
                        mean_roi: relevant as f64 / total,
                    }
                })
                .collect()
        }
        (SweepParam::RegionSize, false) => values
            .iter()
            .map(|&v| {
                let cfg = with_value(v);
                let (m, scores) = dataset_scores(dataset, &cfg)?;
                let total = (scores.len() * m) as f64;
                let relevant: usize = scores
                    .iter()
                    .map(|s| s.iter().filter(|&&x| x >= cfg.spatial_threshold).count())
                    .sum();
                Ok(SweepPoint {
                    value: v,
                    mean_roi: relevant as f64 / total,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        (_, true) => values
            .iter()
            .map(|&v| {
                let cfg = with_value(v);
                let (header, events) = simulate_sequence(&dataset.frames, &cfg)?;
                let series = roi_series(&events, header.region_count())?;
                Ok(SweepPoint {
                    value: v,
                    mean_roi: series.mean_roi(),
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(SweepCurve { param, points })
}

/// Counts of regions by MAD value, in bins of `bin_width` intensity units
/// starting at zero.
#[derive(Debug, Clone)]
pub struct MadHistogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

impl MadHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Histogram of per-region MAD over all images of a dataset. Always measures
/// MAD regardless of the configured feature index; region size and noise
/// filter are honored.
pub fn mad_histogram(dataset: &Dataset, config: &SimConfig, bin_width: f64) -> Result<MadHistogram> {
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(SimError::InvalidConfig(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    // MAD of byte images cannot exceed 127.5, so this bounds the bin count.
    if 255.0 / bin_width > 1_000_000.0 {
        return Err(SimError::InvalidConfig(format!(
            "bin width {bin_width} produces an unreasonable number of bins"
        )));
    }
    let grid = uniform_grid(dataset, config)?;
    let per_image: Vec<Vec<usize>> = dataset
        .frames
        .par_iter()
        .map(|frame| -> Result<Vec<usize>> {
            let padded = pad_to_grid(frame, &grid)?;
            let clean = denoise(&padded, config.noise_filter);
            Ok((0..grid.region_count())
                .map(|rid| (features::mad(&grid.view(&clean, rid)) / bin_width) as usize)
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts: Vec<u64> = Vec::new();
    for bins in &per_image {
        for &b in bins {
            if b >= counts.len() {
                counts.resize(b + 1, 0);
            }
            counts[b] += 1;
        }
    }
    Ok(MadHistogram { bin_width, counts })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Write one masked copy of each image into `out_dir`: spatially redundant
/// regions zeroed, relevant regions preserved bit-exact, images cropped back
/// to their original size. A `manifest.csv` maps each output file to its
/// input name and label. Returns the number of images written.
pub fn export_roi_dataset(dataset: &Dataset, config: &SimConfig, out_dir: &Path) -> Result<usize> {
    let grid = uniform_grid(dataset, config)?;
    std::fs::create_dir_all(out_dir).map_err(|e| SimError::io(out_dir.display().to_string(), e))?;
    let masked: Vec<Frame> = dataset
        .frames
        .par_iter()
        .map(|frame| -> Result<Frame> {
            let padded = pad_to_grid(frame, &grid)?;
            let clean = denoise(&padded, config.noise_filter);
            let scores = spatial_scores(&clean, &grid, config);
            let mut out = padded.clone();
            for (rid, &score) in scores.iter().enumerate() {
                if score < config.spatial_threshold {
                    grid.fill(&mut out.pixels, rid, 0);
                }
            }
            Ok(crop(&out, frame.width, frame.height))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut manifest = String::from("output,input,label\n");
    for (i, frame) in masked.iter().enumerate() {
        let name = format!("{i:05}.pgm");
        write_pgm_file(&out_dir.join(&name), frame)?;
        let label = dataset
            .labels
            .as_ref()
            .map(|l| l[i].to_string())
            .unwrap_or_default();
        manifest.push_str(&format!("{name},{},{label}\n", csv_field(&dataset.names[i])));
    }
    let manifest_path = out_dir.join("manifest.csv");
    std::fs::write(&manifest_path, manifest)
        .map_err(|e| SimError::io(manifest_path.display().to_string(), e))?;
    Ok(masked.len())
}

pub fn write_roi_csv<W: Write>(mut w: W, series: &RoiSeries) -> Result<()> {
    w.write_all(b"t,active,srs1,trs1,roi_fraction\n")?;
    for f in &series.frames {
        writeln!(
            w,
            "{},{},{},{},{:.6}",
            f.t, f.active, f.srs1, f.trs1, f.roi_fraction
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(mut w: W, curve: &SweepCurve) -> Result<()> {
    w.write_all(b"param,mean_roi\n")?;
    for p in &curve.points {
        writeln!(w, "{},{:.6}", p.value, p.mean_roi)?;
    }
    Ok(())
}

pub fn write_hist_csv<W: Write>(mut w: W, hist: &MadHistogram) -> Result<()> {
    w.write_all(b"bin_lo,count\n")?;
    for (i, &count) in hist.counts.iter().enumerate() {
        writeln!(w, "{:.6},{}", i as f64 * hist.bin_width, count)?;
    }
    Ok(())
}
