use super::{refine_extremum, Event, VitalsError};
use crate::dsp::{apply_filter, find_peaks, FilterSpec};

/// Fixed respiration-peak prominence, in raw signal units.
pub const RESPIRATION_PROMINENCE: f64 = 10.0;
pub const RESPIRATION_HIGH_PASS: f64 = 0.2;
/// Smoothing window: 150 samples at 62.5 Hz.
pub const RESPIRATION_WINDOW_SECONDS: f64 = 2.4;
pub const MIN_RESPIRATION_SECONDS: f64 = 15.0;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Breaths {
    /// Seconds between successive respiration peaks, stamped at the later one.
    pub intervals: Vec<Event>,
    /// Smoothed-signal value at each respiration peak.
    pub amplitudes: Vec<Event>,
}

/// Breathing from baseline fluctuation of a raw channel. An empty result means
/// no breaths were found; callers carry earlier values forward.
pub fn respiration_metrics(raw: &[f64], sample_rate: f64) -> Result<Breaths, VitalsError> {
    let seconds = raw.len() as f64 / sample_rate;
    if seconds < MIN_RESPIRATION_SECONDS {
        return Err(VitalsError::TooShort { seconds, required: MIN_RESPIRATION_SECONDS });
    }
    let high_passed = apply_filter(raw, FilterSpec::HighPass { cutoff: RESPIRATION_HIGH_PASS }, sample_rate)?;
    let window_len = ((RESPIRATION_WINDOW_SECONDS * sample_rate).round() as usize).max(1);
    let smooth = apply_filter(&high_passed, FilterSpec::MovingAverage { window_len }, sample_rate)?;
    let peaks = find_peaks(&smooth, RESPIRATION_PROMINENCE);

    let times: Vec<f64> = peaks.indices.iter().map(|&i| refine_extremum(&smooth, i) / sample_rate).collect();
    let mut out = Breaths::default();
    for (k, &i) in peaks.indices.iter().enumerate() {
        out.amplitudes.push(Event { time: times[k], value: smooth[i] });
        if k > 0 {
            out.intervals.push(Event { time: times[k], value: times[k] - times[k - 1] });
        }
    }
    Ok(out)
}
