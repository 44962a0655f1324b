use crate::features::{EpochFeatures, Feature};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Box-plot statistics with 1.5·IQR whiskers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Most extreme values still inside the fences.
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub nback_level: u8,
    pub stats: BoxStats,
}

/// Linearly interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    if values.is_empty() {
        return None;
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let (q1, median, q3) = (quantile(&s, 0.25), quantile(&s, 0.5), quantile(&s, 0.75));
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = s.iter().cloned().filter(|v| (lo_fence..=hi_fence).contains(v)).collect();
    Some(BoxStats {
        n: s.len(),
        min: s[0],
        q1,
        median,
        q3,
        max: s[s.len() - 1],
        whisker_low: inside[0],
        whisker_high: inside[inside.len() - 1],
        outliers: s.iter().cloned().filter(|v| !(lo_fence..=hi_fence).contains(v)).collect(),
    })
}

/// One summary per n-back level present, ascending.
pub fn group_summary(epochs: &[EpochFeatures], feature: Feature) -> Vec<GroupSummary> {
    let mut groups: BTreeMap<u8, Vec<f64>> = BTreeMap::new();
    for e in epochs {
        groups.entry(e.nback_level).or_default().push(e.get(feature));
    }
    groups
        .into_iter()
        .filter_map(|(level, v)| box_stats(&v).map(|stats| GroupSummary { nback_level: level, stats }))
        .collect()
}
