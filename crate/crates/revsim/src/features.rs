//! Pixel-level feature indexes: median denoising, MAD/variance statistics,
//! Sobel edge points, and Harris corner points. Out-of-frame taps always
//! replicate the nearest edge pixel.

use rayon::prelude::*;

use crate::frame::{Frame, RegionGrid, RegionView};

/// Replace each pixel by the median of its 3×3 neighborhood.
pub fn median3(frame: &Frame) -> Frame {
    let (w, h) = (frame.width, frame.height);
    let mut out = vec![0u8; w * h];
    for row in 0..h {
        for col in 0..w {
            let mut window = [0u8; 9];
            let mut i = 0;
            for dr in -1..=1 {
                for dc in -1..=1 {
                    window[i] = frame.clamped(row as isize + dr, col as isize + dc);
                    i += 1;
                }
            }
            window.sort_unstable();
            out[row * w + col] = window[4];
        }
    }
    Frame::new(w, h, frame.t, out)
}

/// Mean absolute deviation of a region's intensities.
pub fn mad(region: &RegionView) -> f64 {
    let n = region.pixels.len();
    assert!(n >= 1, "region must be non-empty");
    let mean = region.pixels.iter().map(|&p| p as u64).sum::<u64>() as f64 / n as f64;
    let dev: f64 = region.pixels.iter().map(|&p| (p as f64 - mean).abs()).sum();
    dev / n as f64
}

/// Population variance of a region's intensities.
pub fn variance(region: &RegionView) -> f64 {
    let n = region.pixels.len();
    assert!(n >= 1, "region must be non-empty");
    let mean = region.pixels.iter().map(|&p| p as u64).sum::<u64>() as f64 / n as f64;
    let sq: f64 = region
        .pixels
        .iter()
        .map(|&p| {
            let d = p as f64 - mean;
            d * d
        })
        .sum();
    sq / n as f64
}

/// 3×3 Sobel gradients for every pixel, returned as (Gx, Gy) maps.
pub fn sobel_gradients(frame: &Frame) -> (Vec<i32>, Vec<i32>) {
    let (w, h) = (frame.width, frame.height);
    let mut gx = vec![0i32; w * h];
    let mut gy = vec![0i32; w * h];
    for row in 0..h {
        for col in 0..w {
            let p = |dr: isize, dc: isize| {
                frame.clamped(row as isize + dr, col as isize + dc) as i32
            };
            let (tl, tc, tr) = (p(-1, -1), p(-1, 0), p(-1, 1));
            let (ml, mr) = (p(0, -1), p(0, 1));
            let (bl, bc, br) = (p(1, -1), p(1, 0), p(1, 1));
            gx[row * w + col] = (tr + 2 * mr + br) - (tl + 2 * ml + bl);
            gy[row * w + col] = (bl + 2 * bc + br) - (tl + 2 * tc + tr);
        }
    }
    (gx, gy)
}

fn count_in_regions(mask: &[bool], grid: &RegionGrid) -> Vec<usize> {
    let n = grid.region_size;
    (0..grid.region_count())
        .into_par_iter()
        .map(|rid| {
            let (r0, c0) = grid.origin(rid);
            let mut count = 0;
            for dr in 0..n {
                let start = (r0 + dr) * grid.padded_width + c0;
                count += mask[start..start + n].iter().filter(|&&m| m).count();
            }
            count
        })
        .collect()
}

/// Count Sobel edge points (|Gx|+|Gy| >= `gradient_threshold`) per region.
pub fn edge_counts(frame: &Frame, grid: &RegionGrid, gradient_threshold: u32) -> Vec<usize> {
    debug_assert!(grid.matches(frame));
    let (gx, gy) = sobel_gradients(frame);
    let mask: Vec<bool> = gx
        .iter()
        .zip(&gy)
        .map(|(&x, &y)| (x.unsigned_abs() + y.unsigned_abs()) >= gradient_threshold)
        .collect();
    count_in_regions(&mask, grid)
}

/// Count Harris corner points per region. The structure tensor sums Sobel
/// gradient products over an unweighted 3×3 window; the response is
/// det(A) - k·trace(A)², and a pixel is a corner when it reaches
/// `response_threshold`.
pub fn corner_counts(
    frame: &Frame,
    grid: &RegionGrid,
    k: f64,
    response_threshold: f64,
) -> Vec<usize> {
    debug_assert!(grid.matches(frame));
    let (w, h) = (frame.width, frame.height);
    let (gx, gy) = sobel_gradients(frame);
    let mut ixx = vec![0f64; w * h];
    let mut iyy = vec![0f64; w * h];
    let mut ixy = vec![0f64; w * h];
    for i in 0..w * h {
        let (x, y) = (gx[i] as f64, gy[i] as f64);
        ixx[i] = x * x;
        iyy[i] = y * y;
        ixy[i] = x * y;
    }
    let at = |map: &[f64], row: isize, col: isize| {
        let r = row.clamp(0, h as isize - 1) as usize;
        let c = col.clamp(0, w as isize - 1) as usize;
        map[r * w + c]
    };
    let mut mask = vec![false; w * h];
    for row in 0..h {
        for col in 0..w {
            let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
            for dr in -1..=1 {
                for dc in -1..=1 {
                    let (r, c) = (row as isize + dr, col as isize + dc);
                    sxx += at(&ixx, r, c);
                    syy += at(&iyy, r, c);
                    sxy += at(&ixy, r, c);
                }
            }
            let trace = sxx + syy;
            let response = sxx * syy - sxy * sxy - k * trace * trace;
            mask[row * w + col] = response >= response_threshold;
        }
    }
    count_in_regions(&mask, grid)
}
