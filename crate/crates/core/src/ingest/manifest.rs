use serde::{Deserialize, Serialize};

use super::IngestError;

pub const FORMAT_VERSION: u32 = 1;

/// Trial metadata shared with the browser task runner.
///
/// `answers[i]` is the subject's odd-digit count entered during epoch `i`,
/// `truth_counts[i]` the count actually displayed in epoch `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionManifest {
    pub format_version: u32,
    pub subject_id: String,
    pub nback_level: u8,
    pub sample_rate: f64,
    pub epoch_seconds: f64,
    pub total_epochs: usize,
    pub calibration_epochs: usize,
    #[serde(default)]
    pub answers: Vec<Option<u8>>,
    #[serde(default)]
    pub truth_counts: Vec<Option<u8>>,
}

impl SessionManifest {
    /// Standard 68-epoch trial with no answer log.
    pub fn new(subject_id: &str, nback_level: u8, sample_rate: f64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            subject_id: subject_id.to_string(),
            nback_level,
            sample_rate,
            epoch_seconds: 5.0,
            total_epochs: 68,
            calibration_epochs: 6,
            answers: Vec::new(),
            truth_counts: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        let bad = |msg: String| Err(IngestError::Manifest(msg));
        if self.format_version != FORMAT_VERSION {
            return bad(format!("unsupported format_version {}", self.format_version));
        }
        if self.nback_level > 3 {
            return bad(format!("nback_level {} outside 0..=3", self.nback_level));
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return bad(format!("sample_rate {} must be positive", self.sample_rate));
        }
        if !(self.epoch_seconds.is_finite() && self.epoch_seconds > 0.0) {
            return bad(format!("epoch_seconds {} must be positive", self.epoch_seconds));
        }
        if self.total_epochs < self.calibration_epochs {
            return bad("total_epochs is smaller than calibration_epochs".into());
        }
        if self.answers.len() > self.total_epochs || self.truth_counts.len() > self.total_epochs {
            return bad("answer log longer than total_epochs".into());
        }
        let in_range = |v: &Option<u8>| v.is_none_or(|c| c <= 4);
        if !self.answers.iter().all(in_range) || !self.truth_counts.iter().all(in_range) {
            return bad("answers and truth counts must lie in 0..=4".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, IngestError> {
        let manifest: Self =
            serde_json::from_str(text).map_err(|e| IngestError::Parse { line: e.line(), msg: e.to_string() })?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn read(path: &std::path::Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<(), IngestError> {
        std::fs::write(path, self.to_json() + "\n").map_err(|source| IngestError::Io { path: path.into(), source })
    }
}

/// Percentage of answered epochs `i ≥ n` whose answer differs from the count
/// shown `n` epochs earlier.
pub fn score_answers(manifest: &SessionManifest) -> Result<f64, IngestError> {
    let n = manifest.nback_level as usize;
    let mut scored = 0usize;
    let mut wrong = 0usize;
    for (i, answer) in manifest.answers.iter().enumerate().skip(n) {
        let Some(answer) = answer else { continue };
        let truth = manifest
            .truth_counts
            .get(i - n)
            .copied()
            .flatten()
            .ok_or_else(|| IngestError::Scoring(format!("no truth count for epoch {}", i - n)))?;
        scored += 1;
        if *answer != truth {
            wrong += 1;
        }
    }
    if scored == 0 {
        return Err(IngestError::Scoring("no answered epochs to score".into()));
    }
    Ok(100.0 * wrong as f64 / scored as f64)
}
