//! The 21 per-epoch features, calibration against the trial's first epochs,
//! and per-subject normalization.

mod calibrate;
mod extract;
mod normalize;
mod table;

pub use calibrate::{apply_calibration, CalibrationBaseline};
pub use extract::{extract_epoch, extract_trial, RawEpoch};
pub use normalize::normalize_per_subject;
pub use table::{parse_feature_table, read_feature_table, render_feature_table, write_feature_table};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FEATURE_COUNT: usize = 21;

/// Quality flag bits carried on each epoch.
pub mod flags {
    /// No beat closed inside the epoch; pulse features carried over.
    pub const PULSE_IMPUTED: u32 = 1;
    /// No breath inside the epoch; breathing features carried over.
    pub const BREATH_IMPUTED: u32 = 1 << 1;
    /// No red or IR peak inside the epoch; prominences carried over.
    pub const PROMINENCE_IMPUTED: u32 = 1 << 2;
    /// Some calibration epochs were unusable for the baseline.
    pub const BASELINE_PARTIAL: u32 = 1 << 3;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("epoch {index} [{start}, {end}) lies outside the {len}-sample series")]
    SliceOutOfRange { index: usize, start: usize, end: usize, len: usize },
    #[error("no usable calibration epoch for {0}")]
    Calibration(&'static str),
    #[error("subject {0} has fewer than 2 epochs")]
    Normalization(String),
    #[error("feature table line {line}: {msg}")]
    Table { line: u64, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Spo2,
    Pulse,
    Breathing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Feature {
    Spo2Mean,
    CalibratedSpo2Mean,
    RedAmplitudeMean,
    IrAmplitudeMean,
    CalibratedRedAmplitudeMean,
    CalibratedIrAmplitudeMean,
    RedAcDcRatioMean,
    IrAcDcRatioMean,
    RedPeakProminenceMean,
    IrPeakProminenceMean,
    RedIrAcRatioMean,
    RedAmplitudeVariance,
    IrAmplitudeVariance,
    HeartRateMean,
    CalibratedHeartRateMean,
    PulseFwhmMean,
    PulseWidthRatioMean,
    PulseWidthRatioVariance,
    BreathingRateMean,
    CalibratedBreathingRateMean,
    BreathingAmplitudeMean,
}

impl Feature {
    pub const ALL: [Feature; FEATURE_COUNT] = [
        Feature::Spo2Mean,
        Feature::CalibratedSpo2Mean,
        Feature::RedAmplitudeMean,
        Feature::IrAmplitudeMean,
        Feature::CalibratedRedAmplitudeMean,
        Feature::CalibratedIrAmplitudeMean,
        Feature::RedAcDcRatioMean,
        Feature::IrAcDcRatioMean,
        Feature::RedPeakProminenceMean,
        Feature::IrPeakProminenceMean,
        Feature::RedIrAcRatioMean,
        Feature::RedAmplitudeVariance,
        Feature::IrAmplitudeVariance,
        Feature::HeartRateMean,
        Feature::CalibratedHeartRateMean,
        Feature::PulseFwhmMean,
        Feature::PulseWidthRatioMean,
        Feature::PulseWidthRatioVariance,
        Feature::BreathingRateMean,
        Feature::CalibratedBreathingRateMean,
        Feature::BreathingAmplitudeMean,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::Spo2Mean => "spo2_mean",
            Feature::CalibratedSpo2Mean => "calibrated_spo2_mean",
            Feature::RedAmplitudeMean => "red_amplitude_mean",
            Feature::IrAmplitudeMean => "ir_amplitude_mean",
            Feature::CalibratedRedAmplitudeMean => "calibrated_red_amplitude_mean",
            Feature::CalibratedIrAmplitudeMean => "calibrated_ir_amplitude_mean",
            Feature::RedAcDcRatioMean => "red_acdc_ratio_mean",
            Feature::IrAcDcRatioMean => "ir_acdc_ratio_mean",
            Feature::RedPeakProminenceMean => "red_peak_prominence_mean",
            Feature::IrPeakProminenceMean => "ir_peak_prominence_mean",
            Feature::RedIrAcRatioMean => "red_ir_ac_ratio_mean",
            Feature::RedAmplitudeVariance => "red_amplitude_variance",
            Feature::IrAmplitudeVariance => "ir_amplitude_variance",
            Feature::HeartRateMean => "heart_rate_mean",
            Feature::CalibratedHeartRateMean => "calibrated_heart_rate_mean",
            Feature::PulseFwhmMean => "pulse_fwhm_mean",
            Feature::PulseWidthRatioMean => "pulse_width_ratio_mean",
            Feature::PulseWidthRatioVariance => "pulse_width_ratio_variance",
            Feature::BreathingRateMean => "breathing_rate_mean",
            Feature::CalibratedBreathingRateMean => "calibrated_breathing_rate_mean",
            Feature::BreathingAmplitudeMean => "breathing_amplitude_mean",
        }
    }

    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn category(self) -> Category {
        match self.index() {
            0..=12 => Category::Spo2,
            13..=17 => Category::Pulse,
            _ => Category::Breathing,
        }
    }

    /// The raw feature a calibrated feature is measured against.
    pub fn raw_counterpart(self) -> Option<Feature> {
        match self {
            Feature::CalibratedSpo2Mean => Some(Feature::Spo2Mean),
            Feature::CalibratedRedAmplitudeMean => Some(Feature::RedAmplitudeMean),
            Feature::CalibratedIrAmplitudeMean => Some(Feature::IrAmplitudeMean),
            Feature::CalibratedHeartRateMean => Some(Feature::HeartRateMean),
            Feature::CalibratedBreathingRateMean => Some(Feature::BreathingRateMean),
            _ => None,
        }
    }
}

/// One analysis epoch: identity, label and the feature vector in
/// [`Feature::ALL`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochFeatures {
    pub subject_id: String,
    pub nback_level: u8,
    pub epoch_index: usize,
    pub values: [f64; FEATURE_COUNT],
    pub quality_flags: u32,
}

impl EpochFeatures {
    pub fn get(&self, feature: Feature) -> f64 {
        self.values[feature.index()]
    }
}
