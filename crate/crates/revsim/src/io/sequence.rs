//! Loading frame sequences and labeled datasets from disk.

use std::path::{Path, PathBuf};

use crate::error::{Result, SimError};
use crate::frame::{to_grayscale, Frame, RgbFrame};
use crate::io::{idx, pgm};

/// An ordered set of equally sized grayscale frames with optional labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub frames: Vec<Frame>,
    /// One display name per frame: the file name for directory inputs, the
    /// image index for IDX inputs.
    pub names: Vec<String>,
    pub labels: Option<Vec<u8>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Load every `.pgm` and `.png` file in `dir`, sorted by file name.
    /// Frame indices follow the sorted order.
    pub fn from_dir(dir: &Path) -> Result<Dataset> {
        let entries = std::fs::read_dir(dir)
            .map_err(|e| SimError::io(dir.display().to_string(), e))?;
        let mut paths: Vec<PathBuf> = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| SimError::io(dir.display().to_string(), e))?;
            let path = entry.path();
            if path.is_file() && matches!(extension(&path).as_deref(), Some("pgm" | "png")) {
                paths.push(path);
            }
        }
        if paths.is_empty() {
            return Err(SimError::EmptyInput(format!(
                "no .pgm or .png frames in {}",
                dir.display()
            )));
        }
        paths.sort_by_key(|p| p.file_name().map(|n| n.to_owned()));

        let mut frames: Vec<Frame> = Vec::with_capacity(paths.len());
        let mut names = Vec::with_capacity(paths.len());
        for (t, path) in paths.iter().enumerate() {
            let frame = match extension(path).as_deref() {
                Some("pgm") => pgm::read_pgm(path, t as u32)?,
                _ => load_png(path, t as u32)?,
            };
            if let Some(first) = frames.first() {
                if frame.width != first.width || frame.height != first.height {
                    return Err(SimError::DimensionMismatch {
                        expected_width: first.width,
                        expected_height: first.height,
                        width: frame.width,
                        height: frame.height,
                    });
                }
            }
            names.push(path.file_name().unwrap().to_string_lossy().into_owned());
            frames.push(frame);
        }
        Ok(Dataset {
            frames,
            names,
            labels: None,
        })
    }

    /// Load an IDX ubyte image file, with labels when provided.
    pub fn from_idx(images: &Path, labels: Option<&Path>) -> Result<Dataset> {
        let frames = idx::read_idx_images(images)?;
        let labels = match labels {
            Some(path) => {
                let labels = idx::read_idx_labels(path)?;
                if labels.len() != frames.len() {
                    return Err(SimError::IdxFormat(format!(
                        "label count {} does not match image count {}",
                        labels.len(),
                        frames.len()
                    )));
                }
                Some(labels)
            }
            None => None,
        };
        let names = (0..frames.len()).map(|i| i.to_string()).collect();
        Ok(Dataset {
            frames,
            names,
            labels,
        })
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase())
}

/// Decode a PNG and convert it to grayscale with this crate's own weighting,
/// so results do not depend on the decoder's colorimetry.
fn load_png(path: &Path, t: u32) -> Result<Frame> {
    let img = image::open(path).map_err(|e| SimError::Decode {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let rgb = img.to_rgb8();
    let (width, height) = (rgb.width() as usize, rgb.height() as usize);
    let pixels = rgb.pixels().map(|p| [p[0], p[1], p[2]]).collect();
    Ok(to_grayscale(&RgbFrame {
        width,
        height,
        t,
        pixels,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::pgm::write_pgm_file;

    fn save_png(path: &Path, width: u32, height: u32, color: [u8; 3]) {
        let img = image::RgbImage::from_pixel(width, height, image::Rgb(color));
        img.save(path).unwrap();
    }

    #[test]
    fn loads_pgms_sorted_by_name() {
        let dir = tempfile::tempdir().unwrap();
        for (name, value) in [("b.pgm", 20u8), ("a.pgm", 10), ("c.pgm", 30)] {
            write_pgm_file(&dir.path().join(name), &Frame::filled(4, 4, 0, value)).unwrap();
        }
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let ds = Dataset::from_dir(dir.path()).unwrap();
        assert_eq!(ds.names, vec!["a.pgm", "b.pgm", "c.pgm"]);
        assert_eq!(ds.frames[0].pixels[0], 10);
        assert_eq!(ds.frames[2].pixels[0], 30);
        assert_eq!(ds.frames[1].t, 1);
        assert!(ds.labels.is_none());
    }

    #[test]
    fn png_grayscale_uses_own_weighting() {
        // Pure green: round(0.587 * 255) = 150. A decoder-provided luma
        // (Rec. 709) would give 182 instead.
        let dir = tempfile::tempdir().unwrap();
        save_png(&dir.path().join("g.png"), 3, 2, [0, 255, 0]);
        let ds = Dataset::from_dir(dir.path()).unwrap();
        assert!(ds.frames[0].pixels.iter().all(|&p| p == 150));
        assert_eq!((ds.frames[0].width, ds.frames[0].height), (3, 2));
    }

    #[test]
    fn mixed_extensions_load_together() {
        let dir = tempfile::tempdir().unwrap();
        write_pgm_file(&dir.path().join("0.pgm"), &Frame::filled(2, 2, 0, 5)).unwrap();
        save_png(&dir.path().join("1.png"), 2, 2, [255, 255, 255]);
        let ds = Dataset::from_dir(dir.path()).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.frames[1].pixels, vec![255; 4]);
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let dir = tempfile::tempdir().unwrap();
        write_pgm_file(&dir.path().join("0.pgm"), &Frame::filled(2, 2, 0, 5)).unwrap();
        write_pgm_file(&dir.path().join("1.pgm"), &Frame::filled(3, 2, 0, 5)).unwrap();
        assert!(matches!(
            Dataset::from_dir(dir.path()),
            Err(SimError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn undecodable_file_error_names_it() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("bad.png"), b"not a png").unwrap();
        match Dataset::from_dir(dir.path()) {
            Err(SimError::Decode { path, .. }) => assert!(path.contains("bad.png")),
            other => panic!("expected decode error, got {other:?}"),
        }
    }

    #[test]
    fn empty_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            Dataset::from_dir(dir.path()),
            Err(SimError::EmptyInput(_))
        ));
    }

    #[test]
    fn idx_dataset_pairs_images_with_labels() {
        let dir = tempfile::tempdir().unwrap();
        let images = dir.path().join("images.idx");
        let labels = dir.path().join("labels.idx");
        std::fs::write(
            &images,
            idx::images_bytes(&[(2, 2, vec![1, 2, 3, 4]), (2, 2, vec![5, 6, 7, 8])]),
        )
        .unwrap();
        std::fs::write(&labels, idx::labels_bytes(&[3, 9])).unwrap();
        let ds = Dataset::from_idx(&images, Some(&labels)).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.names, vec!["0", "1"]);
        assert_eq!(ds.labels, Some(vec![3, 9]));

        std::fs::write(&labels, idx::labels_bytes(&[3])).unwrap();
        assert!(matches!(
            Dataset::from_idx(&images, Some(&labels)),
            Err(SimError::IdxFormat(_))
        ));
    }
}
