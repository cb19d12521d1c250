//! IDX ubyte files (the MNIST container format): a big-endian magic number,
//! big-endian dimension sizes, then raw unsigned bytes.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Result, SimError};
use crate::frame::Frame;

/// Magic for a 3-dimensional ubyte file (count x rows x cols).
const IMAGES_MAGIC: u32 = 2051;
/// Magic for a 1-dimensional ubyte file (count labels).
const LABELS_MAGIC: u32 = 2049;

fn read_all(path: &Path) -> Result<Vec<u8>> {
    let mut data = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut data).map(|_| ()))
        .map_err(|e| SimError::io(path.display().to_string(), e))?;
    Ok(data)
}

fn be_u32(data: &[u8], pos: usize, what: &str) -> std::result::Result<u32, String> {
    data.get(pos..pos + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| format!("file truncated reading {what}"))
}

fn parse_images(data: &[u8]) -> std::result::Result<Vec<Frame>, String> {
    let magic = be_u32(data, 0, "magic")?;
    if magic != IMAGES_MAGIC {
        return Err(format!("bad magic {magic} (expected {IMAGES_MAGIC} for ubyte images)"));
    }
    let count = be_u32(data, 4, "image count")? as usize;
    let rows = be_u32(data, 8, "row count")? as usize;
    let cols = be_u32(data, 12, "column count")? as usize;
    if rows == 0 || cols == 0 {
        return Err(format!("empty image dimensions {rows}x{cols}"));
    }
    let expected = 16 + count as u64 * rows as u64 * cols as u64;
    if (data.len() as u64) != expected {
        return Err(format!(
            "expected {expected} bytes for {count} images of {rows}x{cols}, found {}",
            data.len()
        ));
    }
    Ok(data[16..]
        .chunks_exact(rows * cols)
        .enumerate()
        .map(|(i, chunk)| Frame::new(cols, rows, i as u32, chunk.to_vec()))
        .collect())
}

fn parse_labels(data: &[u8]) -> std::result::Result<Vec<u8>, String> {
    let magic = be_u32(data, 0, "magic")?;
    if magic != LABELS_MAGIC {
        return Err(format!("bad magic {magic} (expected {LABELS_MAGIC} for ubyte labels)"));
    }
    let count = be_u32(data, 4, "label count")? as usize;
    if data.len() as u64 != 8 + count as u64 {
        return Err(format!(
            "expected {} bytes for {count} labels, found {}",
            8 + count as u64,
            data.len()
        ));
    }
    Ok(data[8..].to_vec())
}

/// Load every image in an IDX ubyte image file; frame `t` is the image index.
pub fn read_idx_images(path: &Path) -> Result<Vec<Frame>> {
    parse_images(&read_all(path)?)
        .map_err(|reason| SimError::IdxFormat(format!("{}: {reason}", path.display())))
}

/// Load an IDX ubyte label file.
pub fn read_idx_labels(path: &Path) -> Result<Vec<u8>> {
    parse_labels(&read_all(path)?)
        .map_err(|reason| SimError::IdxFormat(format!("{}: {reason}", path.display())))
}

#[cfg(test)]
pub(crate) fn images_bytes(frames: &[(usize, usize, Vec<u8>)]) -> Vec<u8> {
    let (rows, cols) = (frames[0].0, frames[0].1);
    let mut data = Vec::new();
    data.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    data.extend_from_slice(&(frames.len() as u32).to_be_bytes());
    data.extend_from_slice(&(rows as u32).to_be_bytes());
    data.extend_from_slice(&(cols as u32).to_be_bytes());
    for (_, _, px) in frames {
        data.extend_from_slice(px);
    }
    data
}

#[cfg(test)]
pub(crate) fn labels_bytes(labels: &[u8]) -> Vec<u8> {
    let mut data = Vec::new();
    data.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    data.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    data.extend_from_slice(labels);
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_two_image_file() {
        let a: Vec<u8> = (0..6).collect();
        let b: Vec<u8> = (10..16).collect();
        let data = images_bytes(&[(2, 3, a.clone()), (2, 3, b.clone())]);
        let frames = parse_images(&data).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!((frames[0].width, frames[0].height), (3, 2));
        assert_eq!(frames[0].pixels, a);
        assert_eq!(frames[1].pixels, b);
        assert_eq!(frames[1].t, 1);
    }

    #[test]
    fn parses_labels() {
        assert_eq!(parse_labels(&labels_bytes(&[7, 2, 1])).unwrap(), vec![7, 2, 1]);
    }

    #[test]
    fn rejects_malformed_files() {
        let check = |data: &[u8], needle: &str| {
            let reason = parse_images(data).unwrap_err();
            assert!(reason.contains(needle), "{reason:?} missing {needle:?}");
        };
        check(&[0, 0], "truncated");
        check(&labels_bytes(&[1, 2]), "bad magic");
        let mut truncated = images_bytes(&[(2, 2, vec![1, 2, 3, 4])]);
        truncated.pop();
        check(&truncated, "expected 20 bytes");
        let mut trailing = images_bytes(&[(2, 2, vec![1, 2, 3, 4])]);
        trailing.push(0);
        check(&trailing, "expected 20 bytes");

        let images = images_bytes(&[(1, 1, vec![5])]);
        assert!(parse_labels(&images).unwrap_err().contains("bad magic"));
        let mut short = labels_bytes(&[1, 2, 3]);
        short.pop();
        assert!(parse_labels(&short).unwrap_err().contains("expected 11 bytes"));
    }

    #[test]
    fn file_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("imgs.idx");
        std::fs::write(&path, [0u8; 4]).unwrap();
        match read_idx_images(&path) {
            Err(SimError::IdxFormat(msg)) => assert!(msg.contains("imgs.idx")),
            other => panic!("expected idx error, got {other:?}"),
        }
    }
}
