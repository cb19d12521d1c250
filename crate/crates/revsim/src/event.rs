//! The region event: one region's relevance decision at one frame index,
//! carrying the raw pixel payload when the region is active.

use crate::rcm::RelevanceBits;

#[derive(Debug, Clone, PartialEq)]
pub struct RegionEvent {
    pub t: u32,
    pub rid: usize,
    pub bits: RelevanceBits,
    pub spatial_score: f64,
    pub mismatch_count: usize,
    /// Raw N² region pixels; present exactly when the region is active.
    pub payload: Option<Vec<u8>>,
}

impl RegionEvent {
    /// Active regions transmit their payload downstream.
    pub fn active(&self) -> bool {
        self.bits.srs && self.bits.trs
    }
}
