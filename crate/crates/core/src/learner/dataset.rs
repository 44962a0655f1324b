use std::collections::BTreeSet;

use crate::features::{EpochFeatures, FEATURE_COUNT};

/// Column-major feature matrix with class-index labels and a group (subject)
/// per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<Vec<f64>>,
    /// Index into `classes` for each sample.
    pub labels: Vec<usize>,
    pub groups: Vec<String>,
    /// Original label values, ascending.
    pub classes: Vec<u8>,
}

impl Dataset {
    /// Builds a dataset from row vectors and raw labels; `classes` is the
    /// sorted set of labels present.
    pub fn from_rows(rows: &[Vec<f64>], labels: &[u8], groups: &[String]) -> Self {
        assert_eq!(rows.len(), labels.len());
        assert_eq!(rows.len(), groups.len());
        let n_features = rows.first().map_or(0, Vec::len);
        let classes: Vec<u8> = labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let columns = (0..n_features).map(|f| rows.iter().map(|r| r[f]).collect()).collect();
        let labels = labels.iter().map(|l| classes.binary_search(l).unwrap()).collect();
        Self { columns, labels, groups: groups.to_vec(), classes }
    }

    pub fn from_epochs(epochs: &[EpochFeatures]) -> Self {
        let rows: Vec<Vec<f64>> = epochs.iter().map(|e| e.values.to_vec()).collect();
        let labels: Vec<u8> = epochs.iter().map(|e| e.nback_level).collect();
        let groups: Vec<String> = epochs.iter().map(|e| e.subject_id.clone()).collect();
        let d = Self::from_rows(&rows, &labels, &groups);
        debug_assert!(d.columns.is_empty() || d.columns.len() == FEATURE_COUNT);
        d
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Rows at `indices`, keeping the full class list so class indices stay
    /// comparable with the parent.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            columns: self.columns.iter().map(|c| indices.iter().map(|&i| c[i]).collect()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            groups: indices.iter().map(|&i| self.groups[i].clone()).collect(),
            classes: self.classes.clone(),
        }
    }

    /// Samples whose label value is in `levels`, re-indexed over those levels.
    pub fn restrict_levels(&self, levels: &[u8]) -> Self {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| levels.contains(&self.classes[self.labels[i]])).collect();
        let rows: Vec<Vec<f64>> = keep.iter().map(|&i| self.row(i)).collect();
        let labels: Vec<u8> = keep.iter().map(|&i| self.classes[self.labels[i]]).collect();
        let groups: Vec<String> = keep.iter().map(|&i| self.groups[i].clone()).collect();
        let mut d = Self::from_rows(&rows, &labels, &groups);
        if rows.is_empty() {
            d.columns = vec![Vec::new(); self.n_features()];
        }
        d
    }

    /// Number of distinct labels among the samples.
    pub fn classes_present(&self) -> usize {
        self.labels.iter().collect::<BTreeSet<_>>().len()
    }
}
