use super::{find_peaks, find_troughs, DspError};

/// Linearly interpolates `values` anchored at sample `positions` onto `0..len`,
/// holding the first/last value outside the anchor range.
pub fn interp_anchors(positions: &[usize], values: &[f64], len: usize) -> Vec<f64> {
    assert_eq!(positions.len(), values.len());
    let mut out = vec![0.0; len];
    if positions.is_empty() {
        return out;
    }
    let first = positions[0].min(len);
    out[..first].fill(values[0]);
    for w in 0..positions.len().saturating_sub(1) {
        let (p0, p1) = (positions[w], positions[w + 1]);
        let (v0, v1) = (values[w], values[w + 1]);
        let span = (p1 - p0) as f64;
        for (i, slot) in out.iter_mut().enumerate().take(p1.min(len)).skip(p0) {
            let t = (i - p0) as f64 / span;
            *slot = v0 + (v1 - v0) * t;
        }
    }
    let last = *positions.last().unwrap();
    if last < len {
        out[last..].fill(*values.last().unwrap());
    }
    out
}

/// Per-sample AC amplitude of a band-passed signal: the interpolated peak
/// curve and the interpolated trough curve, added in absolute value.
pub fn ac_envelope(signal: &[f64], peak_prom: f64, trough_prom: f64) -> Result<Vec<f64>, DspError> {
    let peaks = find_peaks(signal, peak_prom);
    let troughs = find_troughs(signal, trough_prom);
    if peaks.len() < 2 || troughs.len() < 2 {
        return Err(DspError::InsufficientPulses { peaks: peaks.len(), troughs: troughs.len() });
    }
    let upper = interp_anchors(&peaks.indices, &peaks.values, signal.len());
    let lower = interp_anchors(&troughs.indices, &troughs.values, signal.len());
    Ok(upper.iter().zip(&lower).map(|(u, l)| u.abs() + l.abs()).collect())
}
