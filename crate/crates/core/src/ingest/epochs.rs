use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{IngestError, SessionManifest};
use crate::record::PpgRecord;

/// Relative disagreement between marker spacing and the nominal epoch length
/// above which alignment is refused.
const MARKER_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpochSlice {
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub is_calibration: bool,
}

impl EpochSlice {
    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Cuts a record into 5 s epochs.
///
/// With sync markers, epoch `k` runs from marker `k` to marker `k+1`, and the
/// epoch after the last marker gets the whole-sample floor of the nominal
/// length. Without markers, epoch boundaries fall at `round(k·E)` samples for
/// nominal length `E`. Epochs that would run past the record are dropped.
pub fn epoch_align(record: &PpgRecord, manifest: &SessionManifest) -> Result<Vec<EpochSlice>, IngestError> {
    record.validate()?;
    manifest.validate()?;
    let fs = record.sample_rate;
    if ((manifest.sample_rate - fs) / fs).abs() > 1e-6 {
        return Err(IngestError::Alignment(format!(
            "manifest sample rate {} disagrees with recording {}",
            manifest.sample_rate, fs
        )));
    }
    let nominal = manifest.epoch_seconds * fs;
    let n = record.len();

    let mut bounds: Vec<(usize, usize)> = Vec::new();
    let markers = &record.sync_markers;
    if markers.is_empty() {
        let edge = |k: usize| (k as f64 * nominal + 0.5).floor() as usize;
        let mut k = 0;
        while edge(k + 1) <= n {
            bounds.push((edge(k), edge(k + 1)));
            k += 1;
        }
    } else {
        for w in markers.windows(2) {
            let gap = (w[1] - w[0]) as f64;
            if ((gap - nominal) / nominal).abs() > MARKER_TOLERANCE {
                return Err(IngestError::Alignment(format!(
                    "markers at samples {} and {} are {:.2} s apart",
                    w[0],
                    w[1],
                    gap / fs
                )));
            }
            bounds.push((w[0], w[1]));
        }
        let last = *markers.last().unwrap();
        let tail = nominal.floor() as usize;
        if last + tail <= n {
            bounds.push((last, last + tail));
        }
    }

    Ok(bounds
        .into_iter()
        .take(manifest.total_epochs)
        .enumerate()
        .map(|(index, (start, end))| EpochSlice {
            index,
            start,
            end,
            is_calibration: index < manifest.calibration_epochs,
        })
        .collect())
}
