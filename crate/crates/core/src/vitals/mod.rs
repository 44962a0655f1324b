//! SpO₂, pulse and respiration series from a raw record.

mod prominence;
mod pulse;
mod respiration;

pub use prominence::{select_prominence, Channel, CALIBRATION_SECONDS};
pub use pulse::{pulse_metrics, PulseMetrics};
pub use respiration::{respiration_metrics, Breaths, RESPIRATION_PROMINENCE};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::{ac_envelope, apply_filter, find_peaks, DspError, FilterSpec};
use crate::record::PpgRecord;

pub const PULSE_LOW_CUT: f64 = 1.0;
pub const PULSE_HIGH_CUT: f64 = 30.0;
pub const DC_CUTOFF: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VitalsError {
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error("ratio {0} must be non-negative")]
    Domain(f64),
    #[error("signal quality: {0}")]
    SignalQuality(String),
    #[error("record of {seconds:.1} s is shorter than the required {required:.1} s")]
    TooShort { seconds: f64, required: f64 },
}

/// A per-beat or per-breath measurement stamped with its time in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitalsSeries {
    pub sample_rate: f64,
    pub spo2: Vec<f64>,
    pub ac_red: Vec<f64>,
    pub ac_ir: Vec<f64>,
    pub dc_red: Vec<f64>,
    pub dc_ir: Vec<f64>,
    /// Seconds between successive IR troughs, stamped at the closing trough.
    pub pulse_intervals: Vec<Event>,
    pub pulse_fwhm: Vec<Event>,
    pub pulse_width_ratio: Vec<Event>,
    pub breath_intervals: Vec<Event>,
    pub breath_amplitudes: Vec<Event>,
    pub peak_prominences_red: Vec<Event>,
    pub peak_prominences_ir: Vec<Event>,
    pub prominence_red: f64,
    pub prominence_ir: f64,
}

impl VitalsSeries {
    pub fn len(&self) -> usize {
        self.spo2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo2.is_empty()
    }
}

/// `104 − 17·R`, clamped to a valid saturation.
pub fn spo2_from_r(r: f64) -> Result<f64, VitalsError> {
    if !(r >= 0.0) {
        return Err(VitalsError::Domain(r));
    }
    Ok((104.0 - 17.0 * r).clamp(0.0, 100.0))
}

/// Ratio of the red and infrared perfusion ratios.
pub fn compute_r(ac_red: f64, dc_red: f64, ac_ir: f64, dc_ir: f64) -> Result<f64, VitalsError> {
    if !(ac_red > 0.0 && dc_red > 0.0 && ac_ir > 0.0 && dc_ir > 0.0) {
        return Err(VitalsError::SignalQuality(format!(
            "non-positive component (ac_red {ac_red}, dc_red {dc_red}, ac_ir {ac_ir}, dc_ir {dc_ir})"
        )));
    }
    Ok((ac_red / dc_red) / (ac_ir / dc_ir))
}

/// Slow baseline; the record mean when the record is too short for the
/// low-pass to settle.
fn dc_level(raw: &[f64], fs: f64) -> Result<Vec<f64>, VitalsError> {
    match apply_filter(raw, FilterSpec::LowPass { cutoff: DC_CUTOFF }, fs) {
        Ok(dc) => Ok(dc),
        Err(DspError::TooShort { .. }) => {
            let mean = raw.iter().sum::<f64>() / raw.len().max(1) as f64;
            Ok(vec![mean; raw.len()])
        }
        Err(e) => Err(e.into()),
    }
}

fn prominence_events(filtered: &[f64], prominence: f64, fs: f64) -> Vec<Event> {
    let peaks = find_peaks(filtered, prominence);
    peaks.indices.iter().zip(&peaks.prominences).map(|(&i, &p)| Event { time: i as f64 / fs, value: p }).collect()
}

pub fn pulse_band(fs: f64) -> FilterSpec {
    FilterSpec::BandPass { low_cut: PULSE_LOW_CUT, high_cut: PULSE_HIGH_CUT.min(0.45 * fs) }
}

pub fn extract_vitals(record: &PpgRecord) -> Result<VitalsSeries, VitalsError> {
    record.validate().map_err(|e| VitalsError::SignalQuality(e.to_string()))?;
    let fs = record.sample_rate;
    let band = pulse_band(fs);
    let red_f = apply_filter(&record.red, band, fs)?;
    let ir_f = apply_filter(&record.ir, band, fs)?;

    let prominence_red = select_prominence(&red_f, fs, Channel::Red)?;
    let prominence_ir = select_prominence(&ir_f, fs, Channel::Ir)?;

    let ac_red = ac_envelope(&red_f, prominence_red, prominence_red)?;
    let ac_ir = ac_envelope(&ir_f, prominence_ir, prominence_ir)?;
    let dc_red = dc_level(&record.red, fs)?;
    let dc_ir = dc_level(&record.ir, fs)?;

    let spo2 = (0..record.len())
        .map(|i| spo2_from_r(compute_r(ac_red[i], dc_red[i], ac_ir[i], dc_ir[i])?))
        .collect::<Result<Vec<_>, _>>()?;

    let pulse = pulse_metrics(&ir_f, fs, prominence_ir)?;
    let breaths = respiration_metrics(&record.red, fs)?;

    Ok(VitalsSeries {
        sample_rate: fs,
        spo2,
        peak_prominences_red: prominence_events(&red_f, prominence_red, fs),
        peak_prominences_ir: prominence_events(&ir_f, prominence_ir, fs),
        ac_red,
        ac_ir,
        dc_red,
        dc_ir,
        pulse_intervals: pulse.intervals,
        pulse_fwhm: pulse.fwhm,
        pulse_width_ratio: pulse.width_ratio,
        breath_intervals: breaths.intervals,
        breath_amplitudes: breaths.amplitudes,
        prominence_red,
        prominence_ir,
    })
}

/// Sub-sample position of the extremum at `i` from a parabola through its
/// neighbours.
pub(crate) fn refine_extremum(x: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= x.len() {
        return i as f64;
    }
    let (y0, y1, y2) = (x[i - 1], x[i], x[i + 1]);
    let denom = y0 - 2.0 * y1 + y2;
    if denom == 0.0 {
        return i as f64;
    }
    i as f64 + (0.5 * (y0 - y2) / denom).clamp(-0.5, 0.5)
}
