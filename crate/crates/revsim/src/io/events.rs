//! JSON-lines event stream serialization.
//!
//! A stream is one JSON header object on the first line, then one JSON object
//! per region per frame. Event lines use a fixed key order, print the spatial
//! score with exactly six decimal places, and carry the `px` key exactly on
//! active events, so equal simulations produce byte-identical streams. Every
//! frame records all regions in region-id order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::event::RegionEvent;
use crate::frame::{build_grid, RegionGrid};
use crate::rcm::RelevanceBits;

/// First line of a stream: geometry plus the settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventStreamHeader {
    pub version: u32,
    pub width: usize,
    pub height: usize,
    pub region_size: usize,
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub config: SimConfig,
}

impl EventStreamHeader {
    /// Number of regions in one frame.
    pub fn region_count(&self) -> usize {
        self.grid_rows * self.grid_cols
    }

    /// Region geometry for the frames this stream describes.
    pub fn grid(&self) -> RegionGrid {
        build_grid(self.width, self.height, self.region_size)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.version != 1 {
            return Err(format!("unsupported stream version {}", self.version));
        }
        if self.width == 0 || self.height == 0 {
            return Err(format!("empty frame size {}x{}", self.width, self.height));
        }
        if self.region_size != self.config.region_size {
            return Err(format!(
                "header region size {} disagrees with config region size {}",
                self.region_size, self.config.region_size
            ));
        }
        self.config.validate().map_err(|e| e.to_string())?;
        let rows = self.height.div_ceil(self.region_size);
        let cols = self.width.div_ceil(self.region_size);
        if rows != self.grid_rows || cols != self.grid_cols {
            return Err(format!(
                "grid {}x{} does not match {}x{} frames at region size {}",
                self.grid_rows, self.grid_cols, self.width, self.height, self.region_size
            ));
        }
        Ok(())
    }
}

/// Tracks that events arrive frame by frame, each frame covering region ids
/// 0..M in order and frame indices strictly increasing.
struct FrameOrder {
    regions: usize,
    prev: Option<(u32, usize)>,
}

impl FrameOrder {
    fn new(regions: usize) -> Self {
        FrameOrder {
            regions,
            prev: None,
        }
    }

    fn push(&mut self, t: u32, rid: usize) -> std::result::Result<(), String> {
        if rid >= self.regions {
            return Err(format!(
                "region id {rid} out of range (grid has {} regions)",
                self.regions
            ));
        }
        match self.prev {
            None => {
                if rid != 0 {
                    return Err(format!("stream must start at region 0, got region {rid}"));
                }
            }
            Some((pt, pr)) if t == pt => {
                if pr + 1 == self.regions {
                    return Err(format!(
                        "frame {t} already has all {} regions",
                        self.regions
                    ));
                }
                if rid != pr + 1 {
                    return Err(format!(
                        "expected region {} of frame {t}, got region {rid}",
                        pr + 1
                    ));
                }
            }
            Some((pt, _)) if t < pt => {
                return Err(format!("frame index goes backwards ({pt} then {t})"));
            }
            Some((pt, pr)) => {
                if pr + 1 != self.regions {
                    return Err(format!(
                        "frame {pt} ended with {} of {} regions",
                        pr + 1,
                        self.regions
                    ));
                }
                if rid != 0 {
                    return Err(format!("frame {t} must start at region 0, got region {rid}"));
                }
            }
        }
        self.prev = Some((t, rid));
        Ok(())
    }

    fn finish(&self) -> std::result::Result<(), String> {
        if let Some((t, pr)) = self.prev {
            if pr + 1 != self.regions {
                return Err(format!(
                    "stream ends mid-frame: frame {t} has {} of {} regions",
                    pr + 1,
                    self.regions
                ));
            }
        }
        Ok(())
    }
}

fn check_event(event: &RegionEvent, region_area: usize) -> std::result::Result<(), String> {
    if !event.spatial_score.is_finite() {
        return Err(format!("non-finite spatial score {}", event.spatial_score));
    }
    if event.mismatch_count > region_area {
        return Err(format!(
            "mismatch count {} exceeds region area {region_area}",
            event.mismatch_count
        ));
    }
    match (&event.payload, event.active()) {
        (None, true) => Err("active event has no payload".into()),
        (Some(_), false) => Err("inactive event carries a payload".into()),
        (Some(px), true) if px.len() != region_area => Err(format!(
            "payload length {} does not match region area {region_area}",
            px.len()
        )),
        _ => Ok(()),
    }
}

fn write_event_line<W: Write>(w: &mut W, event: &RegionEvent) -> Result<()> {
    write!(
        w,
        "{{\"t\":{},\"rid\":{},\"srs\":{},\"trs\":{},\"ss\":{:.6},\"mc\":{}",
        event.t,
        event.rid,
        event.bits.srs as u8,
        event.bits.trs as u8,
        event.spatial_score,
        event.mismatch_count
    )?;
    if let Some(px) = &event.payload {
        w.write_all(b",\"px\":[")?;
        for (i, p) in px.iter().enumerate() {
            if i > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{p}")?;
        }
        w.write_all(b"]")?;
    }
    w.write_all(b"}\n")?;
    Ok(())
}

/// Write a header and its events. The events must already be in stream order
/// and internally consistent; anything else is reported as corruption rather
/// than silently written.
pub fn write_event_stream<W: Write>(
    mut w: W,
    header: &EventStreamHeader,
    events: &[RegionEvent],
) -> Result<()> {
    header.validate().map_err(SimError::StreamCorruption)?;
    let region_area = header.region_size * header.region_size;
    let mut order = FrameOrder::new(header.region_count());
    let header_line = serde_json::to_string(header)
        .map_err(|e| SimError::StreamCorruption(format!("header does not serialize: {e}")))?;
    w.write_all(header_line.as_bytes())?;
    w.write_all(b"\n")?;
    for (i, event) in events.iter().enumerate() {
        check_event(event, region_area)
            .and_then(|()| order.push(event.t, event.rid))
            .map_err(|reason| SimError::StreamCorruption(format!("event {i}: {reason}")))?;
        write_event_line(&mut w, event)?;
    }
    order.finish().map_err(SimError::StreamCorruption)?;
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EventLine {
    t: u32,
    rid: usize,
    srs: u8,
    trs: u8,
    ss: f64,
    mc: usize,
    #[serde(default)]
    px: Option<Vec<u8>>,
}

fn convert(line: EventLine, region_area: usize) -> std::result::Result<RegionEvent, String> {
    let bit = |name: &str, v: u8| match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(format!("{name} must be 0 or 1, got {v}")),
    };
    let event = RegionEvent {
        t: line.t,
        rid: line.rid,
        bits: RelevanceBits {
            srs: bit("srs", line.srs)?,
            trs: bit("trs", line.trs)?,
        },
        spatial_score: line.ss,
        mismatch_count: line.mc,
        payload: line.px,
    };
    check_event(&event, region_area)?;
    Ok(event)
}

/// Read a stream back, validating structure as it goes. Errors carry the
/// 1-based line number they were found on.
pub fn read_event_stream<R: Read>(reader: R) -> Result<(EventStreamHeader, Vec<RegionEvent>)> {
    let mut lines = BufReader::new(reader).lines();
    let header_line = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(SimError::StreamFormat {
                line: 1,
                reason: "missing header".into(),
            })
        }
    };
    let header: EventStreamHeader =
        serde_json::from_str(&header_line).map_err(|e| SimError::StreamFormat {
            line: 1,
            reason: format!("bad header: {e}"),
        })?;
    header
        .validate()
        .map_err(|reason| SimError::StreamFormat { line: 1, reason })?;
    let region_area = header.region_size * header.region_size;
    let mut order = FrameOrder::new(header.region_count());
    let mut events = Vec::new();
    let mut lineno = 1usize;
    for line in lines {
        lineno += 1;
        let line = line?;
        let parsed: EventLine =
            serde_json::from_str(&line).map_err(|e| SimError::StreamFormat {
                line: lineno,
                reason: e.to_string(),
            })?;
        let event = convert(parsed, region_area)
            .map_err(|reason| SimError::StreamFormat { line: lineno, reason })?;
        order
            .push(event.t, event.rid)
            .map_err(|reason| SimError::StreamFormat { line: lineno, reason })?;
        events.push(event);
    }
    order
        .finish()
        .map_err(|reason| SimError::StreamFormat { line: lineno, reason })?;
    Ok((header, events))
}

pub fn write_events_file(
    path: &Path,
    header: &EventStreamHeader,
    events: &[RegionEvent],
) -> Result<()> {
    let file = File::create(path).map_err(|e| SimError::io(path.display().to_string(), e))?;
    let mut writer = BufWriter::new(file);
    write_event_stream(&mut writer, header, events)?;
    writer
        .flush()
        .map_err(|e| SimError::io(path.display().to_string(), e))
}

pub fn read_events_file(path: &Path) -> Result<(EventStreamHeader, Vec<RegionEvent>)> {
    let file = File::open(path).map_err(|e| SimError::io(path.display().to_string(), e))?;
    read_event_stream(file)
}
