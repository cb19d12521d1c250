//! Grayscale frames and the logical partition of a frame into N×N regions.

use crate::error::{Result, SimError};

/// One grayscale image with a frame index. Pixels are row-major, one byte each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    /// Frame index within a sequence; strictly increasing.
    pub t: u32,
    pub pixels: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, t: u32, pixels: Vec<u8>) -> Frame {
        assert_eq!(pixels.len(), width * height, "pixel count must equal width*height");
        Frame {
            width,
            height,
            t,
            pixels,
        }
    }

    /// A frame filled with a single intensity.
    pub fn filled(width: usize, height: usize, t: u32, value: u8) -> Frame {
        Frame::new(width, height, t, vec![value; width * height])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }

    /// Sample with coordinates clamped into the frame (edge replication).
    #[inline]
    pub fn clamped(&self, row: isize, col: isize) -> u8 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.get(r, c)
    }
}

/// An RGB frame as loaded from a color image, before grayscale conversion.
#[derive(Debug, Clone)]
pub struct RgbFrame {
    pub width: usize,
    pub height: usize,
    pub t: u32,
    /// Row-major RGB triples.
    pub pixels: Vec<[u8; 3]>,
}

/// Rec.601 luma of one RGB triple, rounded half-up.
#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    (y + 0.5).floor().min(255.0) as u8
}

/// Convert an RGB frame to grayscale with Rec.601 weights.
pub fn to_grayscale(rgb: &RgbFrame) -> Frame {
    let pixels = rgb.pixels.iter().map(|&[r, g, b]| luma(r, g, b)).collect();
    Frame::new(rgb.width, rgb.height, rgb.t, pixels)
}

/// Grow a frame so both dimensions are multiples of `n`, replicating the
/// nearest edge pixel into the new right/bottom margin. A frame that already
/// fits is returned unchanged.
pub fn pad_replicate(frame: &Frame, n: usize) -> Frame {
    assert!(n >= 1, "region size must be at least 1");
    let pw = frame.width.div_ceil(n) * n;
    let ph = frame.height.div_ceil(n) * n;
    if pw == frame.width && ph == frame.height {
        return frame.clone();
    }
    let mut pixels = Vec::with_capacity(pw * ph);
    for row in 0..ph {
        let src_row = row.min(frame.height - 1);
        for col in 0..pw {
            let src_col = col.min(frame.width - 1);
            pixels.push(frame.get(src_row, src_col));
        }
    }
    Frame::new(pw, ph, frame.t, pixels)
}

/// Take the top-left `width`×`height` corner, undoing `pad_replicate`.
pub fn crop(frame: &Frame, width: usize, height: usize) -> Frame {
    assert!(width <= frame.width && height <= frame.height, "crop must shrink");
    if width == frame.width && height == frame.height {
        return frame.clone();
    }
    let mut pixels = Vec::with_capacity(width * height);
    for row in 0..height {
        let start = row * frame.width;
        pixels.extend_from_slice(&frame.pixels[start..start + width]);
    }
    Frame::new(width, height, frame.t, pixels)
}

/// The logical partition of a (padded) frame into a grid of N×N regions.
/// Region ids run 0..M-1 in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionGrid {
    pub region_size: usize,
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub padded_width: usize,
    pub padded_height: usize,
}

/// The N² pixels of one region, copied out in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionView {
    pub rid: usize,
    pub origin_row: usize,
    pub origin_col: usize,
    pub pixels: Vec<u8>,
}

/// Lay a grid of `n`×`n` regions over a `width`×`height` frame, rounding the
/// dimensions up to multiples of `n`.
pub fn build_grid(width: usize, height: usize, n: usize) -> RegionGrid {
    assert!(width >= 1 && height >= 1 && n >= 1, "grid over empty frame");
    let grid_cols = width.div_ceil(n);
    let grid_rows = height.div_ceil(n);
    RegionGrid {
        region_size: n,
        grid_rows,
        grid_cols,
        padded_width: grid_cols * n,
        padded_height: grid_rows * n,
    }
}

impl RegionGrid {
    /// Total region count M.
    pub fn region_count(&self) -> usize {
        self.grid_rows * self.grid_cols
    }

    /// Pixel coordinates of a region's top-left corner.
    pub fn origin(&self, rid: usize) -> (usize, usize) {
        debug_assert!(rid < self.region_count());
        let row = (rid / self.grid_cols) * self.region_size;
        let col = (rid % self.grid_cols) * self.region_size;
        (row, col)
    }

    /// True when the frame has exactly this grid's padded dimensions.
    pub fn matches(&self, frame: &Frame) -> bool {
        frame.width == self.padded_width && frame.height == self.padded_height
    }

    /// Copy out one region of a padded frame.
    pub fn view(&self, frame: &Frame, rid: usize) -> RegionView {
        debug_assert!(self.matches(frame), "frame does not match grid dimensions");
        let n = self.region_size;
        let (origin_row, origin_col) = self.origin(rid);
        let mut pixels = Vec::with_capacity(n * n);
        for dr in 0..n {
            let start = (origin_row + dr) * frame.width + origin_col;
            pixels.extend_from_slice(&frame.pixels[start..start + n]);
        }
        RegionView {
            rid,
            origin_row,
            origin_col,
            pixels,
        }
    }

    /// Write `pixels` (N², row-major) into region `rid` of a padded frame buffer.
    pub fn blit(&self, buf: &mut [u8], rid: usize, pixels: &[u8]) {
        let n = self.region_size;
        debug_assert_eq!(pixels.len(), n * n);
        let (origin_row, origin_col) = self.origin(rid);
        for dr in 0..n {
            let dst = (origin_row + dr) * self.padded_width + origin_col;
            buf[dst..dst + n].copy_from_slice(&pixels[dr * n..(dr + 1) * n]);
        }
    }

    /// Fill region `rid` of a padded frame buffer with a constant.
    pub fn fill(&self, buf: &mut [u8], rid: usize, value: u8) {
        let n = self.region_size;
        let (origin_row, origin_col) = self.origin(rid);
        for dr in 0..n {
            let dst = (origin_row + dr) * self.padded_width + origin_col;
            buf[dst..dst + n].fill(value);
        }
    }
}

/// Pad a frame to a grid's dimensions, failing when the frame is larger than
/// the grid allows.
pub fn pad_to_grid(frame: &Frame, grid: &RegionGrid) -> Result<Frame> {
    let padded = pad_replicate(frame, grid.region_size);
    if !grid.matches(&padded) {
        return Err(SimError::DimensionMismatch {
            expected_width: grid.padded_width,
            expected_height: grid.padded_height,
            width: padded.width,
            height: padded.height,
        });
    }
    Ok(padded)
}
