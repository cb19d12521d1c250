//! Adaptive rendering: reconstructs full frames from region events and the
//! renderer's own previous output. Active regions are driven by their payload,
//! temporally quiet regions hold the previous state, and spatially irrelevant
//! regions are zeroed or held depending on policy.

use crate::config::SrsZeroPolicy;
use crate::error::{Result, SimError};
use crate::event::RegionEvent;
use crate::frame::{Frame, RegionGrid};

/// The previously rendered frame. Construct with [`bootstrap`]; the type
/// itself guarantees the state is initialized.
#[derive(Debug, Clone)]
pub struct RendererState {
    rendered: Frame,
}

impl RendererState {
    /// The most recent rendered output.
    pub fn rendered(&self) -> &Frame {
        &self.rendered
    }
}

/// Every frame must carry exactly one event per region, sorted by region id.
fn check_coverage(events: &[RegionEvent], grid: &RegionGrid) -> Result<u32> {
    let m = grid.region_count();
    if events.len() != m {
        return Err(SimError::StreamCorruption(format!(
            "expected {m} events for one frame, got {}",
            events.len()
        )));
    }
    let t = events[0].t;
    for (i, event) in events.iter().enumerate() {
        if event.t != t {
            return Err(SimError::StreamCorruption(format!(
                "mixed frame indices {t} and {} in one frame",
                event.t
            )));
        }
        if event.rid != i {
            return Err(SimError::StreamCorruption(format!(
                "events out of order: expected rid {i}, got {}",
                event.rid
            )));
        }
    }
    Ok(t)
}

/// Build the initial renderer state from a first frame in which every region
/// is active and carries its payload.
pub fn bootstrap(events: &[RegionEvent], grid: &RegionGrid) -> Result<RendererState> {
    if events.is_empty() {
        return Err(SimError::StreamCorruption("empty bootstrap frame".into()));
    }
    let t = check_coverage(events, grid)?;
    let mut pixels = vec![0u8; grid.padded_width * grid.padded_height];
    for event in events {
        let payload = event.payload.as_deref().ok_or_else(|| {
            SimError::StreamCorruption(format!(
                "bootstrap frame missing payload for region {}",
                event.rid
            ))
        })?;
        grid.blit(&mut pixels, event.rid, payload);
    }
    Ok(RendererState {
        rendered: Frame::new(grid.padded_width, grid.padded_height, t, pixels),
    })
}

/// Render the frame for one event set and advance the state. Pixels of a
/// region depend only on that region's own event history.
pub fn render_step(
    state: &mut RendererState,
    events: &[RegionEvent],
    grid: &RegionGrid,
    policy: SrsZeroPolicy,
) -> Result<Frame> {
    if events.is_empty() {
        return Err(SimError::StreamCorruption("empty frame in stream".into()));
    }
    let t = check_coverage(events, grid)?;
    let mut pixels = state.rendered.pixels.clone();
    for event in events {
        if event.active() {
            let payload = event.payload.as_deref().ok_or_else(|| {
                SimError::StreamCorruption(format!(
                    "active event for region {} has no payload",
                    event.rid
                ))
            })?;
            grid.blit(&mut pixels, event.rid, payload);
        } else if !event.bits.srs && policy == SrsZeroPolicy::Zero {
            grid.fill(&mut pixels, event.rid, 0);
        }
        // srs=1,trs=0 (or hold policy): the previous state stays in place
    }
    let frame = Frame::new(grid.padded_width, grid.padded_height, t, pixels);
    state.rendered = frame.clone();
    Ok(frame)
}
