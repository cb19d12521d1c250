//! End-to-end simulation driver: feeds a frame sequence through relevance
//! computation and collects the resulting event stream.

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::event::RegionEvent;
use crate::frame::{build_grid, pad_to_grid, Frame, RegionGrid};
use crate::io::events::EventStreamHeader;
use crate::rcm::{rcm_step, RcmState, RelevanceMap};

/// Drives the simulation over a sequence of equally sized frames.
pub struct Simulator {
    config: SimConfig,
    grid: RegionGrid,
    state: RcmState,
    width: usize,
    height: usize,
    last_t: Option<u32>,
}

impl Simulator {
    /// Set up a simulator for frames of the given original size.
    pub fn new(width: usize, height: usize, config: SimConfig) -> Result<Self> {
        config.validate()?;
        if width == 0 || height == 0 {
            return Err(SimError::InvalidFrame(format!(
                "frame size {width}x{height} is empty"
            )));
        }
        let grid = build_grid(width, height, config.region_size);
        Ok(Simulator {
            config,
            grid,
            state: RcmState::new(),
            width,
            height,
            last_t: None,
        })
    }

    pub fn grid(&self) -> &RegionGrid {
        &self.grid
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Stream header describing this simulator's geometry and settings.
    pub fn header(&self) -> EventStreamHeader {
        EventStreamHeader {
            version: 1,
            width: self.width,
            height: self.height,
            region_size: self.grid.region_size,
            grid_rows: self.grid.grid_rows,
            grid_cols: self.grid.grid_cols,
            config: self.config.clone(),
        }
    }

    /// Process one frame and emit one event per region.
    pub fn step(&mut self, frame: &Frame) -> Result<(RelevanceMap, Vec<RegionEvent>)> {
        if frame.width != self.width || frame.height != self.height {
            return Err(SimError::DimensionMismatch {
                expected_width: self.width,
                expected_height: self.height,
                width: frame.width,
                height: frame.height,
            });
        }
        if let Some(last) = self.last_t {
            if frame.t <= last {
                return Err(SimError::InvalidFrame(format!(
                    "frame index {} does not increase (previous {})",
                    frame.t, last
                )));
            }
        }
        self.last_t = Some(frame.t);
        let padded = pad_to_grid(frame, &self.grid)?;
        rcm_step(&padded, &mut self.state, &self.grid, &self.config)
    }
}

/// Run a whole sequence and return the header plus the flat event list
/// (frame-major, region-minor order).
pub fn simulate_sequence(
    frames: &[Frame],
    config: &SimConfig,
) -> Result<(EventStreamHeader, Vec<RegionEvent>)> {
    let first = frames
        .first()
        .ok_or_else(|| SimError::EmptyInput("no frames to simulate".into()))?;
    let mut sim = Simulator::new(first.width, first.height, config.clone())?;
    let mut events = Vec::with_capacity(frames.len() * sim.grid().region_count());
    for frame in frames {
        let (_, mut frame_events) = sim.step(frame)?;
        events.append(&mut frame_events);
    }
    Ok((sim.header(), events))
}
