use super::VitalsError;
use crate::dsp::find_peaks;

/// Length of the leading window the threshold is tuned on.
pub const CALIBRATION_SECONDS: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Red,
    Ir,
}

impl Channel {
    /// Candidate thresholds, ascending.
    pub fn candidates(self) -> Vec<f64> {
        match self {
            Channel::Ir => (0..=22).map(|k| 40.0 + 5.0 * k as f64).collect(),
            Channel::Red => (10..=30).map(f64::from).collect(),
        }
    }
}

fn interval_cv(indices: &[usize]) -> f64 {
    let gaps: Vec<f64> = indices.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
    var.sqrt() / mean
}

/// Peak-prominence threshold giving the most regular beat intervals over the
/// first [`CALIBRATION_SECONDS`] of a band-passed channel.
///
/// Thresholds finding at least three peaks are preferred over those finding
/// two; among equals the lowest coefficient of variation wins, and exact ties
/// go to the smaller threshold.
pub fn select_prominence(signal: &[f64], sample_rate: f64, channel: Channel) -> Result<f64, VitalsError> {
    let window = (CALIBRATION_SECONDS * sample_rate).round() as usize;
    if signal.len() < window {
        return Err(VitalsError::TooShort {
            seconds: signal.len() as f64 / sample_rate,
            required: CALIBRATION_SECONDS,
        });
    }
    let head = &signal[..window];
    let mut best: Option<(bool, f64, f64)> = None;
    for threshold in channel.candidates() {
        let peaks = find_peaks(head, threshold);
        if peaks.len() < 2 {
            continue;
        }
        let key = (peaks.len() >= 3, interval_cv(&peaks.indices), threshold);
        let better = match best {
            None => true,
            Some((three, cv, _)) => (key.0 && !three) || (key.0 == three && key.1 < cv),
        };
        if better {
            best = Some(key);
        }
    }
    best.map(|(_, _, t)| t)
        .ok_or_else(|| VitalsError::SignalQuality(format!("no {channel:?} threshold finds two peaks")))
}
