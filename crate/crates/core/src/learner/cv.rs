use std::collections::BTreeSet;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{fit_boosted, Dataset, ForestConfig, LearnerError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CvMode {
    Kfold,
    Loso,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    /// Held-out subject, for leave-one-subject-out folds.
    pub test_group: Option<String>,
    pub test_size: usize,
    /// `confusion[true][predicted]` over the dataset's classes.
    pub confusion: Vec<Vec<usize>>,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub mode: CvMode,
    pub classes: Vec<u8>,
    pub folds: Vec<FoldResult>,
    /// Sum of the fold matrices.
    pub confusion: Vec<Vec<usize>>,
    /// `confusion` divided by the fold count.
    pub mean_confusion: Vec<Vec<f64>>,
    /// Recall per class over all test predictions.
    pub per_class_accuracy: Vec<f64>,
    /// Trace over total of `confusion`.
    pub overall_accuracy: f64,
    pub mean_fold_accuracy: f64,
    pub importances: Vec<f64>,
    pub rng_seed: u64,
    pub shuffle_seed: Option<u64>,
    pub warnings: Vec<String>,
}

fn evaluate_fold(
    data: &Dataset,
    train: &[usize],
    test: &[usize],
    config: &ForestConfig,
    warnings: &mut Vec<String>,
    test_group: Option<String>,
) -> Result<(FoldResult, Vec<f64>), LearnerError> {
    let train_set = data.subset(train);
    let seen: BTreeSet<usize> = train_set.labels.iter().copied().collect();
    for (k, class) in data.classes.iter().enumerate() {
        if !seen.contains(&k) {
            let msg = format!(
                "class {class} absent from training data{}",
                test_group.as_ref().map_or(String::new(), |g| format!(" (held out {g})"))
            );
            warn!("{msg}");
            warnings.push(msg);
        }
    }
    let model = fit_boosted(&train_set, config)?;
    let k = data.n_classes();
    let mut confusion = vec![vec![0usize; k]; k];
    for &i in test {
        let predicted = model.predict_index(&data.row(i));
        confusion[data.labels[i]][predicted] += 1;
    }
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let fold =
        FoldResult { test_group, test_size: test.len(), accuracy: correct as f64 / test.len() as f64, confusion };
    Ok((fold, model.importances))
}

fn assemble(
    mode: CvMode,
    data: &Dataset,
    results: Vec<(FoldResult, Vec<f64>)>,
    config: &ForestConfig,
    shuffle_seed: Option<u64>,
    warnings: Vec<String>,
) -> CvReport {
    let k = data.n_classes();
    let mut confusion = vec![vec![0usize; k]; k];
    let mut importances = vec![0.0; data.n_features()];
    let folds: Vec<FoldResult> = results
        .into_iter()
        .map(|(fold, imp)| {
            for (r, row) in fold.confusion.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    confusion[r][c] += v;
                }
            }
            for (a, v) in importances.iter_mut().zip(&imp) {
                *a += v;
            }
            fold
        })
        .collect();
    let n_folds = folds.len().max(1) as f64;
    importances.iter_mut().for_each(|v| *v /= n_folds);
    let total: usize = confusion.iter().flatten().sum();
    let trace: usize = (0..k).map(|c| confusion[c][c]).sum();
    let per_class_accuracy = (0..k)
        .map(|c| {
            let row: usize = confusion[c].iter().sum();
            if row == 0 {
                0.0
            } else {
                confusion[c][c] as f64 / row as f64
            }
        })
        .collect();
    CvReport {
        mode,
        classes: data.classes.clone(),
        mean_confusion: confusion.iter().map(|r| r.iter().map(|&v| v as f64 / n_folds).collect()).collect(),
        overall_accuracy: if total == 0 { 0.0 } else { trace as f64 / total as f64 },
        mean_fold_accuracy: folds.iter().map(|f| f.accuracy).sum::<f64>() / n_folds,
        folds,
        confusion,
        per_class_accuracy,
        importances,
        rng_seed: config.rng_seed,
        shuffle_seed,
        warnings,
    }
}

/// Fold membership after shuffling: the first `n % k` folds get one extra.
pub fn kfold_partition(n: usize, k: usize, shuffle_seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(order[start..start + size].to_vec());
        start += size;
    }
    folds
}

/// Shuffled k-fold cross-validation over all samples, unstratified.
pub fn kfold_cv(data: &Dataset, k: usize, config: &ForestConfig, shuffle_seed: u64) -> Result<CvReport, LearnerError> {
    if k < 2 || data.len() < k {
        return Err(LearnerError::Protocol(format!("{} samples cannot fill {k} folds", data.len())));
    }
    let folds = kfold_partition(data.len(), k, shuffle_seed);
    let mut warnings = Vec::new();
    let mut results = Vec::with_capacity(k);
    for (f, test) in folds.iter().enumerate() {
        let train: Vec<usize> =
            folds.iter().enumerate().filter(|(g, _)| *g != f).flat_map(|(_, v)| v.iter().copied()).collect();
        let mut sorted_test = test.clone();
        sorted_test.sort_unstable();
        results.push(evaluate_fold(data, &train, &sorted_test, config, &mut warnings, None)?);
    }
    Ok(assemble(CvMode::Kfold, data, results, config, Some(shuffle_seed), warnings))
}

/// Leave-one-subject-out: each subject in turn is the whole test fold.
/// Subjects whose epochs span a single class are skipped with a warning.
pub fn loso_cv(data: &Dataset, config: &ForestConfig) -> Result<CvReport, LearnerError> {
    let subjects: BTreeSet<&str> = data.groups.iter().map(String::as_str).collect();
    if subjects.len() < 2 {
        return Err(LearnerError::Protocol(format!(
            "leave-one-subject-out needs ≥ 2 subjects, found {}",
            subjects.len()
        )));
    }
    let mut warnings = Vec::new();
    let mut results = Vec::new();
    for subject in subjects {
        let (test, train): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| data.groups[i] == subject);
        let classes: BTreeSet<usize> = test.iter().map(|&i| data.labels[i]).collect();
        if classes.len() < 2 {
            let msg = format!("subject {subject} has a single class; skipped");
            warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        results.push(evaluate_fold(data, &train, &test, config, &mut warnings, Some(subject.to_string()))?);
    }
    if results.is_empty() {
        return Err(LearnerError::Protocol("no subject has epochs from two or more classes".into()));
    }
    Ok(assemble(CvMode::Loso, data, results, config, None, warnings))
}
