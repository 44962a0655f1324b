use super::MetricsError;
use crate::features::{EpochFeatures, Feature};
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f_statistic: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p_value: f64,
    pub ss_between: f64,
    pub ss_within: f64,
}

/// Upper tail P(F > f) of the F(d1, d2) distribution.
pub fn f_survival(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn one_way_anova<G: AsRef<[f64]>>(groups: &[G]) -> Result<AnovaResult, MetricsError> {
    if groups.len() < 2 {
        return Err(MetricsError::TooFew { what: "groups", need: 2, got: groups.len() });
    }
    for g in groups {
        let g = g.as_ref();
        if g.len() < 2 {
            return Err(MetricsError::TooFew { what: "values per group", need: 2, got: g.len() });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(MetricsError::NonFinite);
        }
    }
    let total: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    let grand = groups.iter().flat_map(|g| g.as_ref()).sum::<f64>() / total as f64;

    let (mut ss_between, mut ss_within) = (0.0, 0.0);
    for g in groups {
        let g = g.as_ref();
        let m = mean(g);
        ss_between += g.len() as f64 * (m - grand).powi(2);
        ss_within += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    let df_between = groups.len() - 1;
    let df_within = total - groups.len();
    let ms_within = ss_within / df_within as f64;
    if ms_within <= 0.0 {
        return Err(MetricsError::UndefinedF);
    }
    let f = (ss_between / df_between as f64) / ms_within;
    Ok(AnovaResult {
        f_statistic: f,
        df_between,
        df_within,
        p_value: f_survival(f, df_between as f64, df_within as f64),
        ss_between,
        ss_within,
    })
}

/// ANOVA of one feature across the n-back levels present, lowest level first.
pub fn anova_by_level(epochs: &[EpochFeatures], feature: Feature) -> Result<AnovaResult, MetricsError> {
    let mut groups: Vec<(u8, Vec<f64>)> = Vec::new();
    for e in epochs {
        match groups.iter_mut().find(|(l, _)| *l == e.nback_level) {
            Some((_, g)) => g.push(e.get(feature)),
            None => groups.push((e.nback_level, vec![e.get(feature)])),
        }
    }
    groups.sort_by_key(|(l, _)| *l);
    let values: Vec<Vec<f64>> = groups.into_iter().map(|(_, g)| g).collect();
    one_way_anova(&values)
}
