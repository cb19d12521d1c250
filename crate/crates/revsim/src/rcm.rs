//! Relevance computation: the array of independent region processors that
//! turns a frame into per-region spatial/temporal bits and events.

use rayon::prelude::*;

use crate::config::{NoiseFilter, ReferenceUpdate, SimConfig, SpatialFeature};
use crate::error::{Result, SimError};
use crate::event::RegionEvent;
use crate::features::{corner_counts, edge_counts, mad, median3, variance};
use crate::frame::{Frame, RegionGrid, RegionView};

/// Raw per-region saliency numbers before thresholding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionScores {
    /// Feature-index value: a point count for edge/corner, an intensity
    /// statistic for mad/variance.
    pub spatial_score: f64,
    /// How many pixels changed temporally (by at least δ).
    pub mismatch_count: usize,
}

/// The two-bit spatial/temporal relevance tag of one region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelevanceBits {
    pub srs: bool,
    pub trs: bool,
}

/// Per-frame relevance decisions for every region, indexed by region id.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceMap {
    pub t: u32,
    pub regions: Vec<(RelevanceBits, RegionScores)>,
}

impl RelevanceMap {
    pub fn active_count(&self) -> usize {
        self.regions
            .iter()
            .filter(|(bits, _)| bits.srs && bits.trs)
            .count()
    }
}

/// Temporal state carried between frames: the denoised previous frame.
#[derive(Debug, Clone, Default)]
pub struct RcmState {
    pub reference_frame: Option<Frame>,
}

impl RcmState {
    pub fn new() -> RcmState {
        RcmState::default()
    }

    pub fn initialized(&self) -> bool {
        self.reference_frame.is_some()
    }
}

/// Count pixels whose intensity changed by at least `delta` between two views
/// of the same region.
pub fn temporal_mismatch(cur: &RegionView, reference: &RegionView, delta: u8) -> usize {
    debug_assert_eq!(cur.pixels.len(), reference.pixels.len());
    cur.pixels
        .iter()
        .zip(&reference.pixels)
        .filter(|(&a, &b)| a.abs_diff(b) >= delta)
        .count()
}

/// Threshold raw scores into relevance bits. The region is active (payload
/// transmitted) exactly when both bits are set.
pub fn classify(scores: &RegionScores, config: &SimConfig) -> (RelevanceBits, bool) {
    let bits = RelevanceBits {
        srs: scores.spatial_score >= config.spatial_threshold,
        trs: scores.mismatch_count >= config.temporal_threshold,
    };
    (bits, bits.srs && bits.trs)
}

/// Spatial saliency score for every region of a (denoised) frame using the
/// configured feature index.
pub fn spatial_scores(frame: &Frame, grid: &RegionGrid, config: &SimConfig) -> Vec<f64> {
    match config.spatial_feature {
        SpatialFeature::Mad => (0..grid.region_count())
            .into_par_iter()
            .map(|rid| mad(&grid.view(frame, rid)))
            .collect(),
        SpatialFeature::Variance => (0..grid.region_count())
            .into_par_iter()
            .map(|rid| variance(&grid.view(frame, rid)))
            .collect(),
        SpatialFeature::Edge => edge_counts(frame, grid, config.edge_gradient_threshold)
            .into_iter()
            .map(|c| c as f64)
            .collect(),
        SpatialFeature::Corner => {
            corner_counts(frame, grid, config.corner_k, config.corner_response_threshold)
                .into_iter()
                .map(|c| c as f64)
                .collect()
        }
    }
}

/// Apply the configured noise filter.
pub fn denoise(frame: &Frame, filter: NoiseFilter) -> Frame {
    match filter {
        NoiseFilter::None => frame.clone(),
        NoiseFilter::Median3 => median3(frame),
    }
}

/// Process one frame: denoise, score every region spatially and temporally,
/// classify, and emit one event per region (sorted by region id). Relevance
/// is computed on denoised pixels while event payloads carry the raw input.
/// On the first frame every region is active regardless of thresholds.
pub fn rcm_step(
    frame: &Frame,
    state: &mut RcmState,
    grid: &RegionGrid,
    config: &SimConfig,
) -> Result<(RelevanceMap, Vec<RegionEvent>)> {
    if !grid.matches(frame) {
        return Err(SimError::DimensionMismatch {
            expected_width: grid.padded_width,
            expected_height: grid.padded_height,
            width: frame.width,
            height: frame.height,
        });
    }
    if let Some(reference) = &state.reference_frame {
        if reference.width != frame.width || reference.height != frame.height {
            return Err(SimError::DimensionMismatch {
                expected_width: reference.width,
                expected_height: reference.height,
                width: frame.width,
                height: frame.height,
            });
        }
    }

    let m = grid.region_count();
    let n2 = grid.region_size * grid.region_size;
    let denoised = denoise(frame, config.noise_filter);
    let scores = spatial_scores(&denoised, grid, config);

    let bootstrap = !state.initialized();
    let mismatches: Vec<usize> = match &state.reference_frame {
        // First frame: every pixel counts as new.
        None => vec![n2; m],
        Some(reference) => (0..m)
            .into_par_iter()
            .map(|rid| {
                temporal_mismatch(
                    &grid.view(&denoised, rid),
                    &grid.view(reference, rid),
                    config.temporal_pixel_delta,
                )
            })
            .collect(),
    };

    let mut regions = Vec::with_capacity(m);
    let mut events = Vec::with_capacity(m);
    for rid in 0..m {
        let region_scores = RegionScores {
            spatial_score: scores[rid],
            mismatch_count: mismatches[rid],
        };
        let (bits, active) = if bootstrap {
            (RelevanceBits { srs: true, trs: true }, true)
        } else {
            classify(&region_scores, config)
        };
        regions.push((bits, region_scores));
        events.push(RegionEvent {
            t: frame.t,
            rid,
            bits,
            spatial_score: region_scores.spatial_score,
            mismatch_count: region_scores.mismatch_count,
            payload: active.then(|| grid.view(frame, rid).pixels),
        });
    }

    match config.reference_update {
        ReferenceUpdate::EveryFrame => state.reference_frame = Some(denoised),
        ReferenceUpdate::OnEvent => {
            if bootstrap {
                state.reference_frame = Some(denoised);
            } else {
                let reference = state.reference_frame.as_mut().expect("initialized");
                for event in &events {
                    if event.active() {
                        let view = grid.view(&denoised, event.rid);
                        grid.blit(&mut reference.pixels, event.rid, &view.pixels);
                    }
                }
                reference.t = denoised.t;
            }
        }
    }

    Ok((
        RelevanceMap {
            t: frame.t,
            regions,
        },
        events,
    ))
}
