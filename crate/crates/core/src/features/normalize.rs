use std::collections::BTreeMap;

use super::{EpochFeatures, FeatureError, FEATURE_COUNT};

/// Z-scores every feature within each subject using the population standard
/// deviation; constant features become 0.
pub fn normalize_per_subject(dataset: &[EpochFeatures]) -> Result<Vec<EpochFeatures>, FeatureError> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in dataset.iter().enumerate() {
        groups.entry(e.subject_id.as_str()).or_default().push(i);
    }
    let mut out = dataset.to_vec();
    for (subject, rows) in groups {
        if rows.len() < 2 {
            return Err(FeatureError::Normalization(subject.to_string()));
        }
        let n = rows.len() as f64;
        for k in 0..FEATURE_COUNT {
            let mean = rows.iter().map(|&i| dataset[i].values[k]).sum::<f64>() / n;
            let var = rows.iter().map(|&i| (dataset[i].values[k] - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            for &i in &rows {
                out[i].values[k] =
                    if sd > 1e-12 * mean.abs().max(1.0) { (dataset[i].values[k] - mean) / sd } else { 0.0 };
            }
        }
    }
    Ok(out)
}
