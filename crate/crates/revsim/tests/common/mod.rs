//! Shared fixtures for the integration tests: synthetic image corpora, a
//! moving-square sequence with a geometric relevance oracle, and naive
//! reference implementations written independently of the library code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revsim::Frame;

pub fn random_frame(rng: &mut ChaCha8Rng, w: usize, h: usize, t: u32) -> Frame {
    Frame::new(w, h, t, (0..w * h).map(|_| rng.gen()).collect())
}

/// Handwritten-digit lookalikes: black 28x28 canvases with a few bright
/// random-walk strokes painted as 2x2 blocks. Deterministic per seed.
pub fn synthetic_digits(count: usize, seed: u64) -> Vec<Frame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut f = Frame::filled(28, 28, i as u32, 0);
            for _ in 0..rng.gen_range(2..=4) {
                let mut r = rng.gen_range(4..24) as isize;
                let mut c = rng.gen_range(4..24) as isize;
                for _ in 0..rng.gen_range(8..=20) {
                    let v = rng.gen_range(180..=255);
                    for (dr, dc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        f.set((r + dr) as usize, (c + dc) as usize, v);
                    }
                    r = (r + rng.gen_range(-1..=1)).clamp(0, 26);
                    c = (c + rng.gen_range(-1..=1)).clamp(0, 26);
                }
            }
            f
        })
        .collect()
}

// --- naive reference implementations ---------------------------------------

pub fn mad_naive(px: &[u8]) -> f64 {
    let mean = px.iter().map(|&p| p as f64).sum::<f64>() / px.len() as f64;
    px.iter().map(|&p| (p as f64 - mean).abs()).sum::<f64>() / px.len() as f64
}

pub fn variance_naive(px: &[u8]) -> f64 {
    let mean = px.iter().map(|&p| p as f64).sum::<f64>() / px.len() as f64;
    px.iter().map(|&p| (p as f64 - mean).powi(2)).sum::<f64>() / px.len() as f64
}

pub fn mismatch_naive(cur: &[u8], reference: &[u8], delta: u8) -> usize {
    cur.iter()
        .zip(reference)
        .filter(|&(&a, &b)| (a as i32 - b as i32).abs() >= delta as i32)
        .count()
}

fn at(frame: &Frame, r: isize, c: isize) -> u8 {
    let rr = r.max(0).min(frame.height as isize - 1) as usize;
    let cc = c.max(0).min(frame.width as isize - 1) as usize;
    frame.get(rr, cc)
}

/// 3x3 median with replicated borders: collect all nine taps and sort.
pub fn median3_naive(frame: &Frame) -> Frame {
    let mut out = frame.clone();
    for r in 0..frame.height as isize {
        for c in 0..frame.width as isize {
            let mut window = Vec::with_capacity(9);
            for dr in -1..=1 {
                for dc in -1..=1 {
                    window.push(at(frame, r + dr, c + dc));
                }
            }
            window.sort_unstable();
            out.set(r as usize, c as usize, window[4]);
        }
    }
    out
}

/// Count of pixels whose Sobel L1 gradient magnitude reaches `g_th`, over the
/// whole frame, using explicit kernel tables.
pub fn sobel_edge_count_naive(frame: &Frame, g_th: u32) -> usize {
    const KX: [[i64; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];
    const KY: [[i64; 3]; 3] = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]];
    let mut count = 0;
    for r in 0..frame.height as isize {
        for c in 0..frame.width as isize {
            let (mut gx, mut gy) = (0i64, 0i64);
            for (i, dr) in (-1..=1).enumerate() {
                for (j, dc) in (-1..=1).enumerate() {
                    let p = at(frame, r + dr, c + dc) as i64;
                    gx += KX[i][j] * p;
                    gy += KY[i][j] * p;
                }
            }
            if gx.unsigned_abs() + gy.unsigned_abs() >= g_th as u64 {
                count += 1;
            }
        }
    }
    count
}

/// Replicate-pad a frame up to the next multiple of `n` in both dimensions.
pub fn pad_naive(frame: &Frame, n: usize) -> Frame {
    let w = frame.width.div_ceil(n) * n;
    let h = frame.height.div_ceil(n) * n;
    let mut out = Frame::filled(w, h, frame.t, 0);
    for r in 0..h {
        for c in 0..w {
            out.set(r, c, frame.get(r.min(frame.height - 1), c.min(frame.width - 1)));
        }
    }
    out
}

/// Row-major pixels of region `rid` in a frame tiled into n-by-n squares.
pub fn region_pixels(frame: &Frame, n: usize, rid: usize, grid_cols: usize) -> Vec<u8> {
    let (gr, gc) = (rid / grid_cols, rid % grid_cols);
    let mut px = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            px.push(frame.get(gr * n + r, gc * n + c));
        }
    }
    px
}

// --- moving square ----------------------------------------------------------

pub const SQUARE_ROW: usize = 52;
pub const SQUARE_SIZE: usize = 16;

/// Left edge of the square per frame: marches right by 8 px per frame, then
/// bounces back. Offset 4 mod 8 keeps the edges off the region grid so every
/// overlapped region really changes.
pub const SQUARE_PATH: [usize; 16] = [
    4, 12, 20, 28, 36, 44, 52, 60, 52, 44, 36, 28, 20, 12, 4, 12,
];

/// 16 frames of 128x128: black background, one white 16x16 square.
pub fn moving_square_frames() -> Vec<Frame> {
    SQUARE_PATH
        .iter()
        .enumerate()
        .map(|(t, &c0)| {
            let mut f = Frame::filled(128, 128, t as u32, 0);
            for r in SQUARE_ROW..SQUARE_ROW + SQUARE_SIZE {
                for c in c0..c0 + SQUARE_SIZE {
                    f.set(r, c, 255);
                }
            }
            f
        })
        .collect()
}

/// For t >= 1: sorted ids of the 8x8 regions that intersect the square at
/// `t` or `t-1` (the regions a motion detector must flag).
pub fn square_oracle(t: u32) -> Vec<usize> {
    let hit = |tt: u32, r0: usize, c0: usize| {
        let sc = SQUARE_PATH[tt as usize];
        r0 < SQUARE_ROW + SQUARE_SIZE
            && r0 + 8 > SQUARE_ROW
            && c0 < sc + SQUARE_SIZE
            && c0 + 8 > sc
    };
    let mut rids = Vec::new();
    for gr in 0..16 {
        for gc in 0..16 {
            if hit(t, gr * 8, gc * 8) || hit(t - 1, gr * 8, gc * 8) {
                rids.push(gr * 16 + gc);
            }
        }
    }
    rids
}

// --- IDX test files ----------------------------------------------------------

/// Minimal IDX ubyte image container for test inputs.
pub fn idx_images_bytes(rows: usize, cols: usize, images: &[Vec<u8>]) -> Vec<u8> {
    let mut data = Vec::new();
    data.extend_from_slice(&2051u32.to_be_bytes());
    data.extend_from_slice(&(images.len() as u32).to_be_bytes());
    data.extend_from_slice(&(rows as u32).to_be_bytes());
    data.extend_from_slice(&(cols as u32).to_be_bytes());
    for px in images {
        assert_eq!(px.len(), rows * cols);
        data.extend_from_slice(px);
    }
    data
}

pub fn idx_labels_bytes(labels: &[u8]) -> Vec<u8> {
    let mut data = Vec::new();
    data.extend_from_slice(&2049u32.to_be_bytes());
    data.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    data.extend_from_slice(labels);
    data
}
