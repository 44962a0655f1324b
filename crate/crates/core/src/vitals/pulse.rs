use super::{refine_extremum, Event, VitalsError};
use crate::dsp::{find_peaks, find_troughs, half_height_width, DspError};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PulseMetrics {
    pub intervals: Vec<Event>,
    /// Seconds, for the peak inside each beat.
    pub fwhm: Vec<Event>,
    /// Peak FWHM over the FWHM of the beat's closing trough.
    pub width_ratio: Vec<Event>,
}

/// Width at half prominence, in samples, of the peak at `k` of `set` on `x`.
fn width_at(x: &[f64], set: &crate::dsp::PeakSet, k: usize) -> f64 {
    let reference = x[set.indices[k]] - set.prominences[k] / 2.0;
    let (l, r) = half_height_width(x, set.indices[k], reference, set.left_bases[k], set.right_bases[k]);
    r - l
}

/// Beat-to-beat metrics from the troughs of a band-passed infrared signal.
/// Beat `k` spans trough `k−1` to trough `k` and is stamped at trough `k`.
pub fn pulse_metrics(ir_filtered: &[f64], sample_rate: f64, prominence: f64) -> Result<PulseMetrics, VitalsError> {
    let troughs = find_troughs(ir_filtered, prominence);
    if troughs.len() < 2 {
        return Err(DspError::InsufficientPulses { peaks: 0, troughs: troughs.len() }.into());
    }
    let peaks = find_peaks(ir_filtered, prominence);
    let negated: Vec<f64> = ir_filtered.iter().map(|v| -v).collect();
    let times: Vec<f64> = troughs.indices.iter().map(|&i| refine_extremum(ir_filtered, i) / sample_rate).collect();

    let mut out = PulseMetrics::default();
    let mut next_peak = 0;
    for k in 1..troughs.len() {
        let (open, close) = (troughs.indices[k - 1], troughs.indices[k]);
        let time = times[k];
        out.intervals.push(Event { time, value: times[k] - times[k - 1] });

        while next_peak < peaks.len() && peaks.indices[next_peak] <= open {
            next_peak += 1;
        }
        let mut best: Option<usize> = None;
        let mut j = next_peak;
        while j < peaks.len() && peaks.indices[j] < close {
            if best.is_none_or(|b| peaks.values[j] > peaks.values[b]) {
                best = Some(j);
            }
            j += 1;
        }
        let Some(p) = best else { continue };
        let peak_width = width_at(ir_filtered, &peaks, p);
        let trough_width = width_at(&negated, &troughs, k);
        let fwhm = peak_width / sample_rate;
        out.fwhm.push(Event { time, value: fwhm });
        if trough_width > 0.0 {
            out.width_ratio.push(Event { time, value: peak_width / trough_width });
        }
    }
    Ok(out)
}
