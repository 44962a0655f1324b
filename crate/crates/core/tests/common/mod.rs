#![allow(dead_code)]

use earspo2::learner::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random walk with occasional flat runs, so plateaus occur.
pub fn random_signal(rng: &mut ChaCha8Rng, len: usize, quantized: bool) -> Vec<f64> {
    let mut x = Vec::with_capacity(len);
    let mut v = 0.0;
    for _ in 0..len {
        if rng.random::<f64>() > 0.15 {
            v += rng.random::<f64>() * 2.0 - 1.0;
        }
        x.push(if quantized { (v * 2.0).round() } else { v });
    }
    x
}

/// Peaks by definition: left-most sample of each local maximum (plateaus
/// included, edges excluded), prominence from walking out to the nearest
/// strictly higher sample on each side. Quadratic in the worst case.
pub fn brute_force_peaks(x: &[f64], min_prominence: f64) -> Vec<(usize, f64)> {
    let n = x.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i - 1] < x[i] {
            let mut j = i;
            while j + 1 < n && x[j + 1] == x[i] {
                j += 1;
            }
            if j + 1 < n && x[j + 1] < x[i] {
                let mut left_min = x[i];
                let mut k = i;
                while k > 0 && x[k - 1] <= x[i] {
                    k -= 1;
                    left_min = left_min.min(x[k]);
                }
                let mut right_min = x[i];
                let mut k = i;
                while k + 1 < n && x[k + 1] <= x[i] {
                    k += 1;
                    right_min = right_min.min(x[k]);
                }
                let prominence = x[i] - left_min.max(right_min);
                if prominence >= min_prominence {
                    out.push((i, prominence));
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Weighted Gini impurity of one side.
fn gini(counts: &[f64]) -> f64 {
    let w: f64 = counts.iter().sum();
    if w == 0.0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|c| (c / w) * (c / w)).sum::<f64>()
}

/// Exhaustive best split by weighted Gini: every feature, every midpoint
/// between consecutive distinct values. Ties go to the lower feature, then
/// the lower threshold.
pub fn brute_force_split(data: &Dataset, weights: &[f64]) -> Option<(usize, f64, f64)> {
    let k = data.n_classes();
    let rows: Vec<usize> = (0..data.len()).filter(|&i| weights[i] > 0.0).collect();
    let w_total: f64 = rows.iter().map(|&i| weights[i]).sum();
    let mut best: Option<(usize, f64, f64)> = None;
    for (f, column) in data.columns.iter().enumerate() {
        let mut values: Vec<f64> = rows.iter().map(|&i| column[i]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let mid = lo + (hi - lo) / 2.0;
            let t = if mid < hi { mid } else { lo };
            let mut left = vec![0.0; k];
            let mut right = vec![0.0; k];
            for &i in &rows {
                if column[i] <= t {
                    left[data.labels[i]] += weights[i];
                } else {
                    right[data.labels[i]] += weights[i];
                }
            }
            let impurity = left.iter().sum::<f64>() * gini(&left) + right.iter().sum::<f64>() * gini(&right);
            if best.is_none_or(|(_, _, b)| impurity < b - 1e-9 * w_total) {
                best = Some((f, t, impurity));
            }
        }
    }
    best
}

/// Small random classification problem with repeated values.
pub fn random_dataset(rng: &mut ChaCha8Rng, weighted: bool) -> (Dataset, Vec<f64>) {
    let n = rng.random_range(2..=50);
    let f = rng.random_range(1..=5);
    let classes = rng.random_range(2..=4u8);
    let levels = rng.random_range(2..=12);
    let rows: Vec<Vec<f64>> =
        (0..n).map(|_| (0..f).map(|_| rng.random_range(0..levels) as f64 * 0.5 - 1.0).collect()).collect();
    let labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..classes)).collect();
    let groups = vec!["g".to_string(); n];
    let weights = (0..n).map(|_| if weighted { rng.random_range(1..=4) as f64 } else { 1.0 }).collect();
    (Dataset::from_rows(&rows, &labels, &groups), weights)
}
