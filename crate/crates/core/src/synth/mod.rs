//! Synthetic two-wavelength PPG with known ground truth.
//!
//! Each wavelength is built as
//!
//! ```text
//! x(t) = DC·(1 + w·sin ψ(t)) + AC_beat·(1 + m·sin ψ(t))·p(φ(t)) + noise
//! ```
//!
//! where `φ` is the cardiac phase integrated from the per-epoch heart rate, `ψ`
//! the respiratory phase, `p` a zero-mean raised-cosine pulse with unit
//! peak-to-peak, `m` the respiratory modulation depth and `w = m·WANDER_GAIN`
//! the baseline wander. Red AC is chosen per beat so that the ratio of
//! perfusion ratios equals [`r_from_spo2`] of that epoch's saturation.

mod cohort;

pub use cohort::{subject_name, synthesize_cohort, CohortParams, Span, SyntheticTrial};

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::record::PpgRecord;

pub const EPOCH_SECONDS: f64 = 5.0;
pub const DEFAULT_SAMPLE_RATE: f64 = 62.5;

/// Baseline wander amplitude, as a fraction of DC, per unit modulation depth.
pub const WANDER_GAIN: f64 = 0.25;
/// Fraction of the cardiac cycle spent on the systolic upstroke.
const PULSE_RISE: f64 = 0.3;
const GREEN_DC_FRACTION: f64 = 0.4;
const GREEN_PERFUSION_GAIN: f64 = 1.5;
const ARTIFACT_DECAY_SECONDS: f64 = 0.3;
const RATE_RAMP_SECONDS: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("SpO2 {0} outside the invertible range [0, 104]")]
    Spo2Domain(f64),
    #[error("invalid ground truth: {0}")]
    InvalidTruth(String),
    #[error("duration {0} s and sample rate {1} Hz must both be positive")]
    InvalidTiming(f64, f64),
}

/// Ratio of ratios that maps to `spo2` under `SpO2 = 104 − 17·R`.
pub fn r_from_spo2(spo2: f64) -> Result<f64, SynthError> {
    if !(0.0..=104.0).contains(&spo2) {
        return Err(SynthError::Spo2Domain(spo2));
    }
    Ok((104.0 - spo2) / 17.0)
}

/// Optional downward motion spikes added to every channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionArtifacts {
    pub rate_per_minute: f64,
    pub amplitude: f64,
}

/// Everything the generator needs; per-epoch series hold their last value past
/// their end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Percent, one value per 5 s epoch.
    pub spo2_trajectory: Vec<f64>,
    /// Beats per minute, per epoch.
    pub heart_rate: Vec<f64>,
    /// Breaths per minute, per epoch.
    pub resp_rate: Vec<f64>,
    pub resp_mod_depth: f64,
    pub dc_red: f64,
    pub dc_ir: f64,
    /// AC/DC fraction of the infrared channel.
    pub perfusion_ir: f64,
    pub noise_sd: f64,
    pub seed: u64,
    #[serde(default)]
    pub artifacts: Option<MotionArtifacts>,
}

impl GroundTruth {
    /// Constant vitals with a clean, comfortably perfused signal.
    pub fn constant(spo2: f64, heart_rate: f64, resp_rate: f64) -> Self {
        Self {
            spo2_trajectory: vec![spo2],
            heart_rate: vec![heart_rate],
            resp_rate: vec![resp_rate],
            resp_mod_depth: 0.2,
            dc_red: 16_000.0,
            dc_ir: 50_000.0,
            perfusion_ir: 0.006,
            noise_sd: 0.0,
            seed: 0,
            artifacts: None,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidTruth(msg));
        let in_range =
            |series: &[f64], lo: f64, hi: f64| !series.is_empty() && series.iter().all(|v| (lo..=hi).contains(v));
        if !in_range(&self.spo2_trajectory, 70.0, 100.0) {
            return bad("SpO2 trajectory must be non-empty and within [70, 100]".into());
        }
        if !in_range(&self.heart_rate, 30.0, 220.0) {
            return bad("heart rate must be non-empty and within [30, 220] bpm".into());
        }
        if !in_range(&self.resp_rate, 4.0, 60.0) {
            return bad("respiration rate must be non-empty and within [4, 60] /min".into());
        }
        if !(0.0..=1.0).contains(&self.resp_mod_depth) {
            return bad(format!("modulation depth {} outside [0, 1]", self.resp_mod_depth));
        }
        if !(self.perfusion_ir > 0.0) {
            return bad("perfusion must be positive".into());
        }
        if !(self.dc_red > 0.0 && self.dc_ir > 0.0) {
            return bad("DC levels must be positive".into());
        }
        if !(self.noise_sd >= 0.0) {
            return bad("noise sd must be non-negative".into());
        }
        Ok(())
    }

    pub fn spo2_at(&self, epoch: usize) -> f64 {
        hold(&self.spo2_trajectory, epoch)
    }

    pub fn heart_rate_at(&self, epoch: usize) -> f64 {
        hold(&self.heart_rate, epoch)
    }

    pub fn resp_rate_at(&self, epoch: usize) -> f64 {
        hold(&self.resp_rate, epoch)
    }
}

fn hold(series: &[f64], epoch: usize) -> f64 {
    series[epoch.min(series.len() - 1)]
}

/// Zero-mean pulse shape with unit peak-to-peak: a raised-cosine upstroke
/// over the first `PULSE_RISE` of the cycle and a slower raised-cosine decay
/// back to the foot, which keeps the systolic top broad.
pub fn pulse_waveform(phase: f64) -> f64 {
    let shape = if phase < PULSE_RISE {
        0.5 * (1.0 - (PI * phase / PULSE_RISE).cos())
    } else {
        0.5 * (1.0 + (PI * (phase - PULSE_RISE) / (1.0 - PULSE_RISE)).cos())
    };
    shape - 0.5
}

/// Phase at which [`pulse_waveform`] peaks.
pub const PULSE_PEAK_PHASE: f64 = PULSE_RISE;

fn sample_count(duration: f64, sample_rate: f64) -> Result<usize, SynthError> {
    if !(duration > 0.0 && sample_rate > 0.0 && duration.is_finite() && sample_rate.is_finite()) {
        return Err(SynthError::InvalidTiming(duration, sample_rate));
    }
    Ok((duration * sample_rate).round() as usize)
}

fn epoch_of(sample: usize, sample_rate: f64) -> usize {
    (sample as f64 / sample_rate / EPOCH_SECONDS).floor() as usize
}

/// Cumulative cycle count driven by a per-epoch rate. A rate change ramps
/// linearly from the current rate over [`RATE_RAMP_SECONDS`], so phase stays
/// smooth; a constant rate produces exactly periodic phase.
struct PhaseTrack {
    sample_rate: f64,
    seg_start: usize,
    seg_base: f64,
    from: f64,
    to: f64,
    ramp: f64,
}

impl PhaseTrack {
    fn new(rate_per_minute: f64, sample_rate: f64) -> Self {
        let ramp = (RATE_RAMP_SECONDS * sample_rate).max(1.0);
        Self { sample_rate, seg_start: 0, seg_base: 0.0, from: rate_per_minute, to: rate_per_minute, ramp }
    }

    fn rate(&self, sample: usize) -> f64 {
        let d = (sample - self.seg_start) as f64;
        if d >= self.ramp {
            self.to
        } else {
            self.from + (self.to - self.from) * d / self.ramp
        }
    }

    fn cycles(&self, sample: usize) -> f64 {
        let d = (sample - self.seg_start) as f64;
        let per_sample = 1.0 / (60.0 * self.sample_rate);
        if self.from == self.to {
            return self.seg_base + d * self.to * per_sample;
        }
        let ramped = d.min(self.ramp);
        let area = self.from * ramped + (self.to - self.from) * ramped * ramped / (2.0 * self.ramp);
        self.seg_base + (area + self.to * (d - ramped)) * per_sample
    }

    /// Cycle count at `sample`, heading for `rate` from this sample on.
    fn advance(&mut self, sample: usize, rate: f64) -> f64 {
        if rate != self.to && sample > 0 {
            self.seg_base = self.cycles(sample);
            self.from = self.rate(sample);
            self.to = rate;
            self.seg_start = sample;
        }
        self.cycles(sample)
    }
}

/// Sample index of every cardiac cycle start, the first cycle starting at
/// sample 0.
pub fn beat_onsets(truth: &GroundTruth, duration: f64, sample_rate: f64) -> Result<Vec<usize>, SynthError> {
    truth.validate()?;
    let n = sample_count(duration, sample_rate)?;
    let mut track = PhaseTrack::new(truth.heart_rate_at(0), sample_rate);
    let mut onsets = vec![0];
    let mut beat = 0.0;
    for i in 1..n {
        let c = track.advance(i, truth.heart_rate_at(epoch_of(i, sample_rate))).floor();
        if c > beat {
            beat = c;
            onsets.push(i);
        }
    }
    Ok(onsets)
}

/// Sync pulse positions: one per complete 5 s epoch, at the epoch start.
pub fn sync_markers(duration: f64, sample_rate: f64) -> Vec<usize> {
    let count = (duration / EPOCH_SECONDS + 1e-9).floor() as usize;
    let n = (duration * sample_rate).round() as usize;
    (0..count).map(|k| (k as f64 * EPOCH_SECONDS * sample_rate + 0.5).floor() as usize).filter(|&m| m < n).collect()
}

/// Renders a record from `truth`. Deterministic in `truth.seed`.
pub fn synthesize(truth: &GroundTruth, duration: f64, sample_rate: f64) -> Result<PpgRecord, SynthError> {
    truth.validate()?;
    let n = sample_count(duration, sample_rate)?;
    let mut rng = ChaCha8Rng::seed_from_u64(truth.seed);
    let noise = Normal::new(0.0, truth.noise_sd.max(0.0)).expect("sd is non-negative");

    let dc_green = truth.dc_ir * GREEN_DC_FRACTION;
    let ac_ir = truth.perfusion_ir * truth.dc_ir;
    let ac_green = truth.perfusion_ir * GREEN_PERFUSION_GAIN * dc_green;
    let wander_depth = truth.resp_mod_depth * WANDER_GAIN;

    let mut red = Vec::with_capacity(n);
    let mut ir = Vec::with_capacity(n);
    let mut green = Vec::with_capacity(n);

    let red_ac_for = |epoch: usize| -> f64 {
        let r = r_from_spo2(truth.spo2_at(epoch)).expect("validated SpO2");
        r * truth.perfusion_ir * truth.dc_red
    };

    let mut cardiac = PhaseTrack::new(truth.heart_rate_at(0), sample_rate);
    let mut respiration = PhaseTrack::new(truth.resp_rate_at(0), sample_rate);
    let mut beat = 0.0;
    let mut ac_red = red_ac_for(0);
    let artifact_decay = (-1.0 / (ARTIFACT_DECAY_SECONDS * sample_rate)).exp();
    let mut artifact = 0.0;

    for i in 0..n {
        let epoch = epoch_of(i, sample_rate);
        let cycles = cardiac.advance(i, truth.heart_rate_at(epoch));
        let resp = respiration.advance(i, truth.resp_rate_at(epoch)).fract();
        if cycles.floor() > beat {
            beat = cycles.floor();
            ac_red = red_ac_for(epoch);
        }
        let phase = cycles.fract();
        let breath = (2.0 * PI * resp).sin();
        let pulse = pulse_waveform(phase) * (1.0 + truth.resp_mod_depth * breath);
        let baseline = 1.0 + wander_depth * breath;

        if let Some(spec) = truth.artifacts {
            artifact *= artifact_decay;
            let p = spec.rate_per_minute / 60.0 / sample_rate;
            if rng.random::<f64>() < p {
                artifact -= spec.amplitude;
            }
        }

        red.push(truth.dc_red * baseline + ac_red * pulse + artifact + noise.sample(&mut rng));
        ir.push(truth.dc_ir * baseline + ac_ir * pulse + artifact + noise.sample(&mut rng));
        green.push(dc_green * baseline + ac_green * pulse + artifact + noise.sample(&mut rng));
    }

    Ok(PpgRecord {
        sample_rate,
        red,
        ir,
        green,
        sync_markers: sync_markers(duration, sample_rate),
        subject_id: "synthetic".to_string(),
        nback_level: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_from_spo2_values() {
        assert_eq!(r_from_spo2(87.0).unwrap(), 1.0);
        assert!((r_from_spo2(97.4).unwrap() - 0.388_24).abs() < 1e-5);
        assert_eq!(r_from_spo2(104.0).unwrap(), 0.0);
        assert!(r_from_spo2(104.5).is_err());
        assert!(r_from_spo2(-1.0).is_err());
    }

    #[test]
    fn pulse_is_zero_mean_unit_swing() {
        let n = 10_000;
        let samples: Vec<f64> = (0..n).map(|i| pulse_waveform(i as f64 / n as f64)).collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let max = samples.iter().cloned().fold(f64::MIN, f64::max);
        let min = samples.iter().cloned().fold(f64::MAX, f64::min);
        assert!(mean.abs() < 1e-3);
        assert!((max - min - 1.0).abs() < 1e-6);
        assert!((pulse_waveform(PULSE_PEAK_PHASE) - max).abs() < 1e-6);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let mut truth = GroundTruth::constant(96.0, 70.0, 14.0);
        truth.noise_sd = 3.0;
        truth.seed = 11;
        let a = synthesize(&truth, 30.0, DEFAULT_SAMPLE_RATE).unwrap();
        let b = synthesize(&truth, 30.0, DEFAULT_SAMPLE_RATE).unwrap();
        assert_eq!(a, b);
        truth.seed = 12;
        let c = synthesize(&truth, 30.0, DEFAULT_SAMPLE_RATE).unwrap();
        assert_ne!(a.red, c.red);
    }

    #[test]
    fn marker_count_is_floor_of_duration_over_epoch() {
        for (duration, expected) in [(340.0, 68), (12.0, 2), (4.9, 0), (5.0, 1)] {
            let m = sync_markers(duration, DEFAULT_SAMPLE_RATE);
            assert_eq!(m.len(), expected, "duration {duration}");
        }
        let m = sync_markers(340.0, DEFAULT_SAMPLE_RATE);
        let gaps: Vec<usize> = m.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps.iter().all(|&g| g == 312 || g == 313));
    }

    #[test]
    fn noiseless_flat_breathing_is_pure_periodic() {
        let mut truth = GroundTruth::constant(97.0, 75.0, 15.0);
        truth.resp_mod_depth = 0.0;
        let fs = 62.5;
        let rec = synthesize(&truth, 20.0, fs).unwrap();
        // 75 bpm at 62.5 Hz: exactly 50 samples per beat
        let onsets = beat_onsets(&truth, 20.0, fs).unwrap();
        assert!(onsets.windows(2).all(|w| w[1] - w[0] == 50));
        for i in 0..rec.len() - 50 {
            assert!((rec.ir[i] - rec.ir[i + 50]).abs() < 1e-6);
            assert!((rec.red[i] - rec.red[i + 50]).abs() < 1e-6);
        }
    }

    #[test]
    fn perfusion_ratio_matches_target_r() {
        let mut truth = GroundTruth::constant(95.0, 60.0, 12.0);
        truth.resp_mod_depth = 0.0;
        let rec = synthesize(&truth, 10.0, 62.5).unwrap();
        let swing = |x: &[f64], dc: f64| {
            let max = x.iter().cloned().fold(f64::MIN, f64::max);
            let min = x.iter().cloned().fold(f64::MAX, f64::min);
            (max - min) / dc
        };
        let r = swing(&rec.red, truth.dc_red) / swing(&rec.ir, truth.dc_ir);
        assert!((r - r_from_spo2(95.0).unwrap()).abs() < 1e-9, "r = {r}");
    }

    #[test]
    fn invalid_truth_is_rejected() {
        let mut truth = GroundTruth::constant(97.0, 75.0, 15.0);
        truth.spo2_trajectory = vec![65.0];
        assert!(synthesize(&truth, 10.0, 62.5).is_err());
        let mut truth = GroundTruth::constant(97.0, 75.0, 15.0);
        truth.perfusion_ir = 0.0;
        assert!(synthesize(&truth, 10.0, 62.5).is_err());
        let truth = GroundTruth::constant(97.0, 75.0, 15.0);
        assert!(synthesize(&truth, 0.0, 62.5).is_err());
    }
}
