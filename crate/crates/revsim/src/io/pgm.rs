//! Binary PGM (P5, maxval 255) reading and writing.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, SimError};
use crate::frame::Frame;

/// Write a frame as binary PGM: `P5\n{width} {height}\n255\n` then raw rows.
pub fn write_pgm<W: Write>(mut w: W, frame: &Frame) -> Result<()> {
    if frame.width == 0 || frame.height == 0 {
        return Err(SimError::InvalidFrame("cannot write an empty image".into()));
    }
    write!(w, "P5\n{} {}\n255\n", frame.width, frame.height)?;
    w.write_all(&frame.pixels)?;
    Ok(())
}

pub fn write_pgm_file(path: &Path, frame: &Frame) -> Result<()> {
    let file = File::create(path).map_err(|e| SimError::io(path.display().to_string(), e))?;
    let mut writer = BufWriter::new(file);
    write_pgm(&mut writer, frame)?;
    writer
        .flush()
        .map_err(|e| SimError::io(path.display().to_string(), e))
}

struct Scanner<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Scanner<'_> {
    /// Skip whitespace and `#` comments (which run to end of line).
    fn skip_space(&mut self) {
        loop {
            match self.data.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while !matches!(self.data.get(self.pos), None | Some(b'\n')) {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> std::result::Result<usize, String> {
        self.skip_space();
        let start = self.pos;
        while matches!(self.data.get(self.pos), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected {what}, found no digits"));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| format!("{what} out of range"))
    }
}

fn parse_pgm(data: &[u8]) -> std::result::Result<(usize, usize, Vec<u8>), String> {
    if data.len() < 2 || &data[..2] != b"P5" {
        return Err("not a binary PGM (missing P5 magic)".into());
    }
    let mut s = Scanner { data, pos: 2 };
    let width = s.number("width")?;
    let height = s.number("height")?;
    let maxval = s.number("maxval")?;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval} (only 255)"));
    }
    match s.data.get(s.pos) {
        Some(b) if b.is_ascii_whitespace() => s.pos += 1,
        _ => return Err("missing whitespace after maxval".into()),
    }
    if width == 0 || height == 0 {
        return Err(format!("empty image {width}x{height}"));
    }
    let need = width
        .checked_mul(height)
        .ok_or("image dimensions overflow")?;
    let rest = &s.data[s.pos..];
    if rest.len() < need {
        return Err(format!(
            "pixel data truncated: expected {need} bytes, found {}",
            rest.len()
        ));
    }
    if rest.len() > need {
        return Err(format!(
            "trailing bytes after pixel data: expected {need}, found {}",
            rest.len()
        ));
    }
    Ok((width, height, rest.to_vec()))
}

/// Read a binary PGM, assigning the frame index `t`.
pub fn read_pgm(path: &Path, t: u32) -> Result<Frame> {
    let mut data = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut data).map(|_| ()))
        .map_err(|e| SimError::io(path.display().to_string(), e))?;
    let (width, height, pixels) = parse_pgm(&data).map_err(|reason| SimError::Decode {
        path: path.display().to_string(),
        reason,
    })?;
    Ok(Frame::new(width, height, t, pixels))
}
