use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Raw three-wavelength PPG stream with epoch-boundary sync markers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PpgRecord {
    pub sample_rate: f64,
    pub red: Vec<f64>,
    pub ir: Vec<f64>,
    pub green: Vec<f64>,
    /// Sample indices carrying a sync pulse, strictly increasing.
    pub sync_markers: Vec<usize>,
    pub subject_id: String,
    pub nback_level: Option<u8>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecordError {
    #[error("sample rate {0} must be positive")]
    SampleRate(f64),
    #[error("channel lengths differ: red {red}, ir {ir}, green {green}")]
    LengthMismatch { red: usize, ir: usize, green: usize },
    #[error("sync markers must be strictly increasing and inside the record")]
    Markers,
    #[error("n-back level {0} outside 0..=3")]
    Level(u8),
}

impl PpgRecord {
    pub fn len(&self) -> usize {
        self.ir.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ir.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(RecordError::SampleRate(self.sample_rate));
        }
        if self.red.len() != self.ir.len() || self.green.len() != self.ir.len() {
            return Err(RecordError::LengthMismatch {
                red: self.red.len(),
                ir: self.ir.len(),
                green: self.green.len(),
            });
        }
        let increasing = self.sync_markers.windows(2).all(|w| w[0] < w[1]);
        let inside = self.sync_markers.last().is_none_or(|&m| m < self.len());
        if !increasing || !inside {
            return Err(RecordError::Markers);
        }
        if let Some(level) = self.nback_level {
            if level > 3 {
                return Err(RecordError::Level(level));
            }
        }
        Ok(())
    }
}
