use std::collections::BTreeMap;

use super::{flags, EpochFeatures, Feature, FeatureError, RawEpoch};

/// Mean of each calibrated feature's raw counterpart over the trial's
/// calibration epochs, skipping epochs where that value was imputed.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationBaseline {
    pub means: BTreeMap<Feature, f64>,
    /// True when some calibration epoch had to be skipped.
    pub partial: bool,
}

impl CalibrationBaseline {
    pub fn from_trial(epochs: &[RawEpoch]) -> Result<Self, FeatureError> {
        let mut means = BTreeMap::new();
        let mut partial = false;
        for calibrated in Feature::ALL {
            let Some(raw) = calibrated.raw_counterpart() else { continue };
            let k = raw.index();
            let calib: Vec<&RawEpoch> = epochs.iter().filter(|e| e.is_calibration).collect();
            let good: Vec<f64> = calib.iter().filter(|e| !e.imputed[k]).map(|e| e.values[k]).collect();
            if good.is_empty() {
                return Err(FeatureError::Calibration(raw.name()));
            }
            partial |= good.len() < calib.len();
            means.insert(raw, good.iter().sum::<f64>() / good.len() as f64);
        }
        Ok(Self { means, partial })
    }

    pub fn get(&self, raw: Feature) -> f64 {
        self.means[&raw]
    }
}

/// Fills calibrated slots as raw minus baseline and drops the calibration
/// epochs themselves.
pub fn apply_calibration(
    trial: &[RawEpoch],
    baseline: &CalibrationBaseline,
    subject_id: &str,
    nback_level: u8,
) -> Vec<EpochFeatures> {
    trial
        .iter()
        .filter(|e| !e.is_calibration)
        .map(|e| {
            let mut values = e.values;
            for f in Feature::ALL {
                if let Some(raw) = f.raw_counterpart() {
                    values[f.index()] = values[raw.index()] - baseline.get(raw);
                }
            }
            let partial = if baseline.partial { flags::BASELINE_PARTIAL } else { 0 };
            EpochFeatures {
                subject_id: subject_id.to_string(),
                nback_level,
                epoch_index: e.index,
                values,
                quality_flags: e.flags | partial,
            }
        })
        .collect()
}
