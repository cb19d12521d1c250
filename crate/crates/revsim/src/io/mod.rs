//! On-disk formats: event streams, PGM images, IDX datasets, and frame
//! sequence directories.

pub mod events;
pub mod idx;
pub mod pgm;
pub mod sequence;
