//! Region-level event camera simulation.
//!
//! Frames are split into fixed-size regions. Each region is scored for
//! spatial relevance (edges, corners, or dispersion statistics) and temporal
//! relevance (changed pixels against a reference frame), and each frame emits
//! one event per region carrying the two relevance bits plus, for active
//! regions, the raw pixel payload. Downstream code reconstructs viewable
//! frames from the event stream alone ([`renderer`]) and measures how much
//! redundant pixel traffic the scheme removes ([`analytics`]).

pub mod analytics;
pub mod cli;
pub mod config;
pub mod error;
pub mod event;
pub mod features;
pub mod frame;
pub mod io;
pub mod rcm;
pub mod renderer;
pub mod sim;

pub use config::{NoiseFilter, ReferenceUpdate, SimConfig, SpatialFeature, SrsZeroPolicy};
pub use error::{Result, SimError};
pub use event::RegionEvent;
pub use frame::{build_grid, Frame, RegionGrid};
pub use io::events::EventStreamHeader;
pub use rcm::{RelevanceBits, RelevanceMap};
pub use sim::{simulate_sequence, Simulator};
