use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Dataset, Tree};

/// Bagged CART trees with per-bootstrap balanced class weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
    pub n_classes: usize,
}

/// Bootstrap draw counts and balanced weights for one tree: each class in
/// the bootstrap gets total weight `n / classes_present`.
pub fn balanced_bootstrap(labels: &[usize], n_classes: usize, rng: &mut impl Rng) -> Vec<f64> {
    let n = labels.len();
    let mut counts = vec![0usize; n];
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
    let mut per_class = vec![0usize; n_classes];
    for (i, &c) in counts.iter().enumerate() {
        per_class[labels[i]] += c;
    }
    let present = per_class.iter().filter(|&&c| c > 0).count() as f64;
    counts
        .iter()
        .zip(labels)
        .map(|(&c, &l)| if c == 0 { 0.0 } else { c as f64 * n as f64 / (present * per_class[l] as f64) })
        .collect()
}

impl Forest {
    /// Trains `n_trees` trees; `weights` multiply the bootstrap weights.
    /// Per-tree seeds come from one stream seeded with `seed`, so the result
    /// does not depend on thread scheduling.
    pub fn fit(
        data: &Dataset,
        weights: &[f64],
        n_trees: usize,
        max_features: usize,
        balanced: bool,
        seed: u64,
    ) -> Self {
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        let seeds: Vec<u64> = (0..n_trees).map(|_| master.random()).collect();
        let n_classes = data.n_classes();
        let trees = seeds
            .par_iter()
            .map(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let boot = if balanced {
                    balanced_bootstrap(&data.labels, n_classes, &mut rng)
                } else {
                    let mut counts = vec![0.0; data.len()];
                    for _ in 0..data.len() {
                        counts[rng.random_range(0..data.len())] += 1.0;
                    }
                    counts
                };
                let w: Vec<f64> = boot.iter().zip(weights).map(|(b, w)| b * w).collect();
                Tree::fit(data, &w, max_features, &mut rng)
            })
            .collect();
        Self { trees, n_classes }
    }

    /// Mean of the trees' leaf distributions.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n_classes];
        for t in &self.trees {
            for (acc, v) in p.iter_mut().zip(t.leaf(x)) {
                *acc += v;
            }
        }
        for v in &mut p {
            *v /= self.trees.len() as f64;
        }
        p
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.predict_proba(x))
    }

    /// Mean of per-tree normalized importances.
    pub fn importances(&self) -> Vec<f64> {
        let n = self.trees.first().map_or(0, |t| t.importances.len());
        let mut out = vec![0.0; n];
        for t in &self.trees {
            for (o, v) in out.iter_mut().zip(&t.importances) {
                *o += v;
            }
        }
        let total: f64 = out.iter().sum();
        if total > 0.0 {
            for v in &mut out {
                *v /= total;
            }
        }
        out
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
