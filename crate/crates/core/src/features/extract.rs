use super::{flags, Feature, FeatureError, FEATURE_COUNT};
use crate::ingest::EpochSlice;
use crate::vitals::{Event, VitalsSeries};

/// An epoch's non-calibrated features before trial-level imputation.
/// Calibrated slots hold 0 until [`super::apply_calibration`].
#[derive(Debug, Clone, PartialEq)]
pub struct RawEpoch {
    pub index: usize,
    pub is_calibration: bool,
    pub values: [f64; FEATURE_COUNT],
    /// Slots carried over from a neighbouring epoch.
    pub imputed: [bool; FEATURE_COUNT],
    pub flags: u32,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn variance(xs: &[f64]) -> Option<f64> {
    let m = mean(xs.iter().copied())?;
    mean(xs.iter().map(|x| (x - m).powi(2)))
}

fn in_slice<'a>(events: &'a [Event], slice: &EpochSlice, fs: f64) -> impl Iterator<Item = f64> + 'a {
    let (start, end) = (slice.start as f64, slice.end as f64);
    events
        .iter()
        .filter(move |e| {
            let pos = e.time * fs;
            pos >= start && pos < end
        })
        .map(|e| e.value)
}

/// Per-epoch features; `None` where the epoch holds no beats or breaths to
/// average. Events belong to the epoch containing their timestamp.
pub fn extract_epoch(vitals: &VitalsSeries, slice: &EpochSlice) -> Result<[Option<f64>; FEATURE_COUNT], FeatureError> {
    if slice.end > vitals.len() || slice.is_empty() {
        return Err(FeatureError::SliceOutOfRange {
            index: slice.index,
            start: slice.start,
            end: slice.end,
            len: vitals.len(),
        });
    }
    let r = slice.range();
    let fs = vitals.sample_rate;
    let sample_mean = |xs: &[f64]| mean(xs[r.clone()].iter().copied());
    let ratio_mean = |a: &[f64], b: &[f64]| mean(r.clone().map(|i| a[i] / b[i]));

    let mut out = [None; FEATURE_COUNT];
    let mut set = |f: Feature, v: Option<f64>| out[f.index()] = v;
    set(Feature::Spo2Mean, sample_mean(&vitals.spo2));
    set(Feature::RedAmplitudeMean, sample_mean(&vitals.ac_red));
    set(Feature::IrAmplitudeMean, sample_mean(&vitals.ac_ir));
    set(Feature::RedAcDcRatioMean, ratio_mean(&vitals.ac_red, &vitals.dc_red));
    set(Feature::IrAcDcRatioMean, ratio_mean(&vitals.ac_ir, &vitals.dc_ir));
    set(Feature::RedPeakProminenceMean, mean(in_slice(&vitals.peak_prominences_red, slice, fs)));
    set(Feature::IrPeakProminenceMean, mean(in_slice(&vitals.peak_prominences_ir, slice, fs)));
    set(Feature::RedIrAcRatioMean, ratio_mean(&vitals.ac_red, &vitals.ac_ir));
    set(Feature::RedAmplitudeVariance, variance(&vitals.ac_red[r.clone()]));
    set(Feature::IrAmplitudeVariance, variance(&vitals.ac_ir[r.clone()]));
    set(Feature::HeartRateMean, mean(in_slice(&vitals.pulse_intervals, slice, fs).map(|iv| 60.0 / iv)));
    set(Feature::PulseFwhmMean, mean(in_slice(&vitals.pulse_fwhm, slice, fs)));
    let ratios: Vec<f64> = in_slice(&vitals.pulse_width_ratio, slice, fs).collect();
    set(Feature::PulseWidthRatioMean, mean(ratios.iter().copied()));
    set(Feature::PulseWidthRatioVariance, variance(&ratios));
    set(Feature::BreathingRateMean, mean(in_slice(&vitals.breath_intervals, slice, fs).map(|iv| 60.0 / iv)));
    set(Feature::BreathingAmplitudeMean, mean(in_slice(&vitals.breath_amplitudes, slice, fs)));
    for f in Feature::ALL.iter().filter(|f| f.raw_counterpart().is_some()) {
        out[f.index()] = Some(0.0);
    }
    Ok(out)
}

fn flag_for(feature: Feature) -> u32 {
    match feature {
        Feature::HeartRateMean
        | Feature::PulseFwhmMean
        | Feature::PulseWidthRatioMean
        | Feature::PulseWidthRatioVariance => flags::PULSE_IMPUTED,
        Feature::BreathingRateMean | Feature::BreathingAmplitudeMean => flags::BREATH_IMPUTED,
        Feature::RedPeakProminenceMean | Feature::IrPeakProminenceMean => flags::PROMINENCE_IMPUTED,
        _ => 0,
    }
}

/// Extracts every epoch of a trial and fills empty slots from the previous
/// epoch, or from the next one for leading gaps. A slot empty in every epoch
/// becomes 0. Filled slots are flagged.
pub fn extract_trial(vitals: &VitalsSeries, slices: &[EpochSlice]) -> Result<Vec<RawEpoch>, FeatureError> {
    let partials = slices.iter().map(|s| extract_epoch(vitals, s)).collect::<Result<Vec<_>, _>>()?;
    let mut out: Vec<RawEpoch> = slices
        .iter()
        .map(|s| RawEpoch {
            index: s.index,
            is_calibration: s.is_calibration,
            values: [0.0; FEATURE_COUNT],
            imputed: [false; FEATURE_COUNT],
            flags: 0,
        })
        .collect();

    for f in Feature::ALL {
        let k = f.index();
        let column: Vec<Option<f64>> = partials.iter().map(|p| p[k]).collect();
        let first = column.iter().flatten().next().copied();
        let mut carry = first;
        for (e, value) in column.iter().enumerate() {
            match value {
                Some(v) => {
                    out[e].values[k] = *v;
                    carry = Some(*v);
                }
                None => {
                    out[e].values[k] = carry.unwrap_or(0.0);
                    out[e].imputed[k] = true;
                    out[e].flags |= flag_for(f);
                }
            }
        }
    }
    Ok(out)
}
