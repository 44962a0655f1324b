//! Shared signal machinery: zero-phase IIR filtering, topographic peak
//! detection and AC envelope construction.

mod envelope;
mod filter;
mod peaks;

pub use envelope::{ac_envelope, interp_anchors};
pub use filter::{apply_filter, Biquad, Cascade, FilterSpec};
pub use peaks::{find_peaks, find_troughs, half_height_width, PeakSet};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("signal of {len} samples is too short for this filter (needs more than {required})")]
    TooShort { len: usize, required: usize },
    #[error("invalid filter specification: {0}")]
    InvalidSpec(String),
    #[error("insufficient pulses: found {peaks} peaks and {troughs} troughs, need at least 2 of each")]
    InsufficientPulses { peaks: usize, troughs: usize },
}
