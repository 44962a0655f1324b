use std::f64::consts::PI;

use super::DspError;

/// Butterworth order used for every IIR realization.
const BUTTERWORTH_ORDER: usize = 4;

/// A filter to apply to a uniformly sampled signal.
///
/// IIR kinds are 4th-order Butterworth sections run forward and backward, so the
/// magnitude response is squared and the phase response cancels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterSpec {
    BandPass {
        low_cut: f64,
        high_cut: f64,
    },
    LowPass {
        cutoff: f64,
    },
    HighPass {
        cutoff: f64,
    },
    /// Centered boxcar of `window_len` samples. Even lengths sit half a sample
    /// ahead of the output index.
    MovingAverage {
        window_len: usize,
    },
}

impl FilterSpec {
    pub fn validate(&self, sample_rate: f64) -> Result<(), DspError> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(DspError::InvalidSpec(format!("sample rate {sample_rate} must be positive")));
        }
        let nyquist = sample_rate / 2.0;
        let check_cut = |f: f64, what: &str| -> Result<(), DspError> {
            if f.is_finite() && f > 0.0 && f < nyquist {
                Ok(())
            } else {
                Err(DspError::InvalidSpec(format!("{what} {f} Hz must lie in (0, {nyquist}) Hz")))
            }
        };
        match *self {
            FilterSpec::BandPass { low_cut, high_cut } => {
                check_cut(low_cut, "low cut")?;
                check_cut(high_cut, "high cut")?;
                if low_cut >= high_cut {
                    return Err(DspError::InvalidSpec(format!(
                        "low cut {low_cut} Hz must be below high cut {high_cut} Hz"
                    )));
                }
                Ok(())
            }
            FilterSpec::LowPass { cutoff } => check_cut(cutoff, "cutoff"),
            FilterSpec::HighPass { cutoff } => check_cut(cutoff, "cutoff"),
            FilterSpec::MovingAverage { window_len } => {
                if window_len == 0 {
                    Err(DspError::InvalidSpec("moving-average window must be >= 1".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Longest time constant of the filter, in samples.
    pub fn time_constant_samples(&self, sample_rate: f64) -> f64 {
        let tau = |f: f64| sample_rate / (2.0 * PI * f);
        match *self {
            FilterSpec::BandPass { low_cut, .. } => tau(low_cut),
            FilterSpec::LowPass { cutoff } | FilterSpec::HighPass { cutoff } => tau(cutoff),
            FilterSpec::MovingAverage { window_len } => window_len as f64,
        }
    }

    /// Minimum signal length accepted by [`apply_filter`].
    pub fn min_len(&self, sample_rate: f64) -> usize {
        (3.0 * self.time_constant_samples(sample_rate)).ceil() as usize
    }

    /// Second-order sections for the IIR kinds, `None` for the moving average.
    pub fn design(&self, sample_rate: f64) -> Result<Option<Cascade>, DspError> {
        self.validate(sample_rate)?;
        let cascade = match *self {
            FilterSpec::BandPass { low_cut, high_cut } => {
                let mut sections = butterworth(Kind::High, low_cut, sample_rate);
                sections.extend(butterworth(Kind::Low, high_cut, sample_rate));
                Cascade { sections, lowest_cut: low_cut }
            }
            FilterSpec::LowPass { cutoff } => {
                Cascade { sections: butterworth(Kind::Low, cutoff, sample_rate), lowest_cut: cutoff }
            }
            FilterSpec::HighPass { cutoff } => {
                Cascade { sections: butterworth(Kind::High, cutoff, sample_rate), lowest_cut: cutoff }
            }
            FilterSpec::MovingAverage { .. } => return Ok(None),
        };
        Ok(Some(cascade))
    }
}

/// Normalized biquad `b0 + b1 z^-1 + b2 z^-2 / 1 + a1 z^-1 + a2 z^-2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }

    /// Transposed direct-form II state for a constant unit input.
    fn steady_state(&self) -> [f64; 2] {
        let g = self.dc_gain();
        let z2 = self.b[2] - self.a[1] * g;
        let z1 = self.b[1] - self.a[0] * g + z2;
        [z1, z2]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    pub sections: Vec<Biquad>,
    lowest_cut: f64,
}

impl Cascade {
    fn run(&self, x: &mut [f64], init_level: f64) {
        let mut level = init_level;
        for s in &self.sections {
            let [mut z1, mut z2] = s.steady_state();
            z1 *= level;
            z2 *= level;
            for v in x.iter_mut() {
                let input = *v;
                let y = s.b[0] * input + z1;
                z1 = s.b[1] * input - s.a[0] * y + z2;
                z2 = s.b[2] * input - s.a[1] * y;
                *v = y;
            }
            level *= s.dc_gain();
        }
    }

    fn filtfilt(&self, signal: &[f64], sample_rate: f64) -> Vec<f64> {
        let n = signal.len();
        let tau = sample_rate / (2.0 * PI * self.lowest_cut);
        let pad = ((6.0 * tau).ceil() as usize).max(3 * (2 * self.sections.len() + 1)).min(n - 1);
        // Leading state is set from the mean over about one cutoff period.
        let settle = ((sample_rate / self.lowest_cut).ceil() as usize).max(1);

        let mut ext = Vec::with_capacity(n + 2 * pad);
        // Point-symmetric extension keeps value and slope continuous at the ends.
        let (first, last) = (signal[0], signal[n - 1]);
        ext.extend((1..=pad).rev().map(|i| 2.0 * first - signal[i]));
        ext.extend_from_slice(signal);
        ext.extend((n - 1 - pad..n - 1).rev().map(|i| 2.0 * last - signal[i]));

        let level = leading_mean(&ext, settle);
        self.run(&mut ext, level);
        ext.reverse();
        let level = leading_mean(&ext, settle);
        self.run(&mut ext, level);
        ext.reverse();
        ext[pad..pad + n].to_vec()
    }
}

fn leading_mean(x: &[f64], len: usize) -> f64 {
    let m = len.min(x.len());
    x[..m].iter().sum::<f64>() / m as f64
}

#[derive(Clone, Copy)]
enum Kind {
    Low,
    High,
}

/// Bilinear-transform Butterworth sections with prewarped cutoff.
fn butterworth(kind: Kind, cutoff: f64, sample_rate: f64) -> Vec<Biquad> {
    let w0 = 2.0 * PI * cutoff / sample_rate;
    let (sw, cw) = w0.sin_cos();
    // 1 - cos(w0), computed without cancellation at tiny cutoffs
    let omc = 2.0 * (w0 / 2.0).sin().powi(2);
    (0..BUTTERWORTH_ORDER / 2)
        .map(|k| {
            let theta = PI * (2 * k + 1) as f64 / (2 * BUTTERWORTH_ORDER) as f64;
            let q = 1.0 / (2.0 * theta.sin());
            let alpha = sw / (2.0 * q);
            let a0 = 1.0 + alpha;
            let a = [-2.0 * cw / a0, (1.0 - alpha) / a0];
            let b = match kind {
                // taken from the rounded poles so the DC gain is 1 to rounding
                Kind::Low => {
                    let g = (1.0 + a[0] + a[1]) / 4.0;
                    [g, 2.0 * g, g]
                }
                Kind::High => {
                    let g = (2.0 - omc) / 2.0 / a0;
                    [g, -2.0 * g, g]
                }
            };
            Biquad { b, a }
        })
        .collect()
}

fn moving_average(signal: &[f64], window_len: usize) -> Vec<f64> {
    let n = signal.len();
    let back = window_len / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(back);
            let hi = (i + window_len - back).min(n);
            signal[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Filters `signal` with zero phase. Output has the input's length.
pub fn apply_filter(signal: &[f64], spec: FilterSpec, sample_rate: f64) -> Result<Vec<f64>, DspError> {
    spec.validate(sample_rate)?;
    let required = spec.min_len(sample_rate);
    if signal.len() <= required {
        return Err(DspError::TooShort { len: signal.len(), required });
    }
    match spec.design(sample_rate)? {
        Some(cascade) => {
            // Filtering the offset from the first sample keeps constants exact
            // when the poles sit close to the unit circle.
            let origin = signal[0];
            let shifted: Vec<f64> = signal.iter().map(|v| v - origin).collect();
            let mut out = cascade.filtfilt(&shifted, sample_rate);
            if matches!(spec, FilterSpec::LowPass { .. }) {
                out.iter_mut().for_each(|v| *v += origin);
            }
            Ok(out)
        }
        None => match spec {
            FilterSpec::MovingAverage { window_len } => Ok(moving_average(signal, window_len)),
            _ => unreachable!("IIR kinds always design a cascade"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 62.5;

    fn sine(freq: f64, amp: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| amp * (2.0 * PI * freq * i as f64 / FS).sin()).collect()
    }

    /// |H(e^jw)|^2 of the designed sections; forward-backward filtering applies it once.
    fn power_response(cascade: &Cascade, freq: f64) -> f64 {
        let w = 2.0 * PI * freq / FS;
        cascade
            .sections
            .iter()
            .map(|s| {
                let (re_n, im_n) = (
                    s.b[0] + s.b[1] * w.cos() + s.b[2] * (2.0 * w).cos(),
                    -s.b[1] * w.sin() - s.b[2] * (2.0 * w).sin(),
                );
                let (re_d, im_d) =
                    (1.0 + s.a[0] * w.cos() + s.a[1] * (2.0 * w).cos(), -s.a[0] * w.sin() - s.a[1] * (2.0 * w).sin());
                (re_n * re_n + im_n * im_n) / (re_d * re_d + im_d * im_d)
            })
            .product()
    }

    fn steady_amplitude(y: &[f64], skip: usize) -> f64 {
        let core = &y[skip..y.len() - skip];
        core.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    #[test]
    fn lowpass_preserves_constant() {
        let x = vec![500.0; 21_250];
        let y = apply_filter(&x, FilterSpec::LowPass { cutoff: 0.01 }, FS).unwrap();
        assert!(y.iter().all(|v| (v - 500.0).abs() < 1e-6));
    }

    #[test]
    fn bandpass_passband_sine_matches_designed_response() {
        let spec = FilterSpec::BandPass { low_cut: 1.0, high_cut: 30.0 };
        let cascade = spec.design(FS).unwrap().unwrap();
        let oracle = power_response(&cascade, 5.0);
        let y = apply_filter(&sine(5.0, 1.0, 4000), spec, FS).unwrap();
        let amp = steady_amplitude(&y, 500);
        assert!((amp - oracle).abs() < 0.01, "amp {amp} oracle {oracle}");
        assert!((amp - 1.0).abs() < 0.02);
    }

    #[test]
    fn bandpass_rejects_slow_sine() {
        let spec = FilterSpec::BandPass { low_cut: 1.0, high_cut: 30.0 };
        let cascade = spec.design(FS).unwrap().unwrap();
        let oracle = power_response(&cascade, 0.05);
        assert!(oracle < 1e-9);
        let y = apply_filter(&sine(0.05, 1.0, 20_000), spec, FS).unwrap();
        assert!(steady_amplitude(&y, 1000) < 0.05);
    }

    #[test]
    fn bandpass_has_zero_dc_gain() {
        let x = vec![123.0; 2000];
        let y = apply_filter(&x, FilterSpec::BandPass { low_cut: 1.0, high_cut: 30.0 }, FS).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn moving_average_dc_gain_and_window() {
        let x = vec![7.0; 600];
        let y = apply_filter(&x, FilterSpec::MovingAverage { window_len: 150 }, FS).unwrap();
        assert!(y.iter().all(|v| (v - 7.0).abs() < 1e-12));
        let ramp: Vec<f64> = (0..600).map(|i| i as f64).collect();
        let y = apply_filter(&ramp, FilterSpec::MovingAverage { window_len: 3 }, FS).unwrap();
        assert!((y[10] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn short_signal_is_rejected() {
        let x = vec![0.0; 100];
        let err = apply_filter(&x, FilterSpec::LowPass { cutoff: 0.01 }, FS).unwrap_err();
        assert!(matches!(err, DspError::TooShort { .. }));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let x = vec![0.0; 5000];
        for spec in [
            FilterSpec::BandPass { low_cut: 30.0, high_cut: 1.0 },
            FilterSpec::BandPass { low_cut: 1.0, high_cut: 40.0 },
            FilterSpec::LowPass { cutoff: 0.0 },
            FilterSpec::MovingAverage { window_len: 0 },
        ] {
            assert!(matches!(apply_filter(&x, spec, FS), Err(DspError::InvalidSpec(_))), "{spec:?}");
        }
    }

    #[test]
    fn passband_peaks_are_not_shifted() {
        let x = sine(1.5, 1.0, 3000);
        let y = apply_filter(&x, FilterSpec::BandPass { low_cut: 1.0, high_cut: 30.0 }, FS).unwrap();
        // edge transients are excluded: first and last two seconds
        let interior =
            |v: &Vec<usize>| -> Vec<usize> { v.iter().copied().filter(|&i| i > 125 && i < 3000 - 125).collect() };
        let px = interior(&crate::dsp::find_peaks(&x, 0.5).indices);
        let py = interior(&crate::dsp::find_peaks(&y, 0.2).indices);
        assert_eq!(px.len(), py.len());
        for (a, b) in px.iter().zip(&py) {
            assert!(a.abs_diff(*b) <= 1, "{a} vs {b}");
        }
    }
}
