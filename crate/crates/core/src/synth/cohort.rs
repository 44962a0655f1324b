use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{synthesize, GroundTruth, PpgRecord, SynthError, DEFAULT_SAMPLE_RATE, EPOCH_SECONDS};
use crate::ingest::SessionManifest;

/// Closed interval sampled uniformly; `lo == hi` pins the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn fixed(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.hi > self.lo {
            rng.random_range(self.lo..=self.hi)
        } else {
            self.lo
        }
    }
}

/// Parameters of a simulated study. Subject baselines are drawn once per
/// subject; each trial adds its own offsets and per-epoch jitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortParams {
    pub n_subjects: usize,
    /// SpO₂ change (percent) applied to level `k` after the calibration epochs.
    pub spo2_shift_per_level: [f64; 4],
    pub seed: u64,
    pub sample_rate: f64,
    pub total_epochs: usize,
    pub calibration_epochs: usize,
    pub spo2: Span,
    pub heart_rate: Span,
    pub resp_rate: Span,
    pub resp_mod_depth: Span,
    pub dc_red: Span,
    pub dc_ir: Span,
    pub perfusion_ir: Span,
    /// Per-subject multiplier on the level shifts.
    pub response_gain: Span,
    /// Per-trial constant offsets (SD) of SpO₂, heart rate and respiration rate.
    pub trial_offset_sd: [f64; 3],
    /// Per-epoch jitter (SD) of SpO₂, heart rate and respiration rate.
    pub epoch_jitter_sd: [f64; 3],
    pub noise_sd: f64,
    /// Fraction of scored epochs answered wrongly at each level.
    pub mistake_rates: [f64; 4],
}

impl Default for CohortParams {
    fn default() -> Self {
        Self {
            n_subjects: 8,
            spo2_shift_per_level: [0.0, -0.1, -0.2, -0.4],
            seed: 1,
            sample_rate: DEFAULT_SAMPLE_RATE,
            total_epochs: 68,
            calibration_epochs: 6,
            spo2: Span::new(96.7, 98.1),
            heart_rate: Span::new(74.0, 95.0),
            resp_rate: Span::new(10.0, 16.0),
            resp_mod_depth: Span::new(0.15, 0.3),
            dc_red: Span::new(14_000.0, 20_000.0),
            dc_ir: Span::new(40_000.0, 60_000.0),
            perfusion_ir: Span::new(0.006, 0.008),
            response_gain: Span::fixed(1.0),
            trial_offset_sd: [0.0; 3],
            epoch_jitter_sd: [0.02, 1.0, 0.3],
            noise_sd: 0.25,
            mistake_rates: [0.021, 0.016, 0.131, 0.297],
        }
    }
}

impl CohortParams {
    pub fn duration(&self) -> f64 {
        self.total_epochs as f64 * EPOCH_SECONDS
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTrial {
    pub record: PpgRecord,
    pub truth: GroundTruth,
    pub manifest: SessionManifest,
}

pub fn subject_name(k: usize) -> String {
    format!("s{:02}", k + 1)
}

/// Four trials (levels 0..=3) per subject, in subject-major order.
pub fn synthesize_cohort(params: &CohortParams) -> Result<Vec<SyntheticTrial>, SynthError> {
    if params.n_subjects == 0 || params.total_epochs < params.calibration_epochs {
        return Err(SynthError::InvalidTruth("cohort needs subjects and total ≥ calibration epochs".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let normal = |sd: f64| Normal::new(0.0, sd.max(0.0)).expect("finite sd");
    let mut trials = Vec::with_capacity(4 * params.n_subjects);

    for s in 0..params.n_subjects {
        let base_spo2 = params.spo2.sample(&mut rng);
        let base_hr = params.heart_rate.sample(&mut rng);
        let base_rr = params.resp_rate.sample(&mut rng);
        let depth = params.resp_mod_depth.sample(&mut rng);
        let dc_red = params.dc_red.sample(&mut rng);
        let dc_ir = params.dc_ir.sample(&mut rng);
        let perfusion = params.perfusion_ir.sample(&mut rng);
        let gain = params.response_gain.sample(&mut rng);

        for level in 0..4u8 {
            let offsets: Vec<f64> = params.trial_offset_sd.iter().map(|&sd| normal(sd).sample(&mut rng)).collect();
            let shift = params.spo2_shift_per_level[level as usize] * gain;
            let [j_spo2, j_hr, j_rr] = params.epoch_jitter_sd.map(normal);
            let mut spo2 = Vec::with_capacity(params.total_epochs);
            let mut hr = Vec::with_capacity(params.total_epochs);
            let mut rr = Vec::with_capacity(params.total_epochs);
            for e in 0..params.total_epochs {
                let active = if e >= params.calibration_epochs { shift } else { 0.0 };
                spo2.push((base_spo2 + offsets[0] + active + j_spo2.sample(&mut rng)).clamp(70.0, 100.0));
                hr.push((base_hr + offsets[1] + j_hr.sample(&mut rng)).clamp(30.0, 220.0));
                rr.push((base_rr + offsets[2] + j_rr.sample(&mut rng)).clamp(10.0, 18.0));
            }
            let truth = GroundTruth {
                spo2_trajectory: spo2,
                heart_rate: hr,
                resp_rate: rr,
                resp_mod_depth: depth,
                dc_red,
                dc_ir,
                perfusion_ir: perfusion,
                noise_sd: params.noise_sd,
                seed: rng.random(),
                artifacts: None,
            };
            let mut record = synthesize(&truth, params.duration(), params.sample_rate)?;
            record.subject_id = subject_name(s);
            record.nback_level = Some(level);

            let mut manifest = SessionManifest::new(&record.subject_id, level, params.sample_rate);
            manifest.total_epochs = params.total_epochs;
            manifest.calibration_epochs = params.calibration_epochs;
            simulate_answers(&mut manifest, params.mistake_rates[level as usize], &mut rng);
            trials.push(SyntheticTrial { record, truth, manifest });
        }
    }
    Ok(trials)
}

/// Fills truth counts (odd digits among four random digits) and a subject who
/// answers each scorable epoch wrongly with probability `mistake_rate`.
fn simulate_answers(manifest: &mut SessionManifest, mistake_rate: f64, rng: &mut impl Rng) {
    let odd = Binomial::new(4, 0.5).expect("valid binomial");
    let n = manifest.nback_level as usize;
    manifest.truth_counts = (0..manifest.total_epochs).map(|_| Some(odd.sample(rng) as u8)).collect();
    manifest.answers = (0..manifest.total_epochs)
        .map(|i| {
            if i < n {
                return None;
            }
            let truth = manifest.truth_counts[i - n].unwrap();
            if rng.random::<f64>() < mistake_rate {
                Some((truth + rng.random_range(1..=4u8)) % 5)
            } else {
                Some(truth)
            }
        })
        .collect();
}
