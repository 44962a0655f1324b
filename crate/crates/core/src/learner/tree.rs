use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        /// Class weight fractions, summing to 1.
        distribution: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Fully grown CART classifier on weighted Gini impurity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    /// Weighted impurity decrease per feature, normalized to sum 1 (all zero
    /// for a single-leaf tree).
    pub importances: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    /// `Σ_k L_k²/W_L + Σ_k R_k²/W_R`; larger is purer.
    pub score: f64,
}

fn class_totals(data: &Dataset, weights: &[f64], samples: &[usize]) -> Vec<f64> {
    let mut totals = vec![0.0; data.n_classes()];
    for &i in samples {
        totals[data.labels[i]] += weights[i];
    }
    totals
}

fn sum_sq_over(totals: &[f64], w: f64) -> f64 {
    totals.iter().map(|t| t * t).sum::<f64>() / w
}

/// Best threshold on one feature, or `None` when the feature is constant on
/// `samples`. Earlier (lower) thresholds win exact ties.
fn best_threshold(data: &Dataset, weights: &[f64], samples: &[usize], feature: usize) -> Option<(f64, f64)> {
    let column = &data.columns[feature];
    let mut order: Vec<usize> = samples.to_vec();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]));
    if column[order[0]] == column[*order.last().unwrap()] {
        return None;
    }
    let total = class_totals(data, weights, samples);
    let w_total: f64 = total.iter().sum();
    let mut left = vec![0.0; total.len()];
    let mut w_left = 0.0;
    let mut best: Option<(f64, f64)> = None;
    for pos in 0..order.len() - 1 {
        let i = order[pos];
        left[data.labels[i]] += weights[i];
        w_left += weights[i];
        let (lo, hi) = (column[i], column[order[pos + 1]]);
        if lo == hi {
            continue;
        }
        let w_right = w_total - w_left;
        let right_sq: f64 = left.iter().zip(&total).map(|(l, t)| (t - l) * (t - l)).sum();
        let score = sum_sq_over(&left, w_left) + right_sq / w_right;
        if best.is_none_or(|(s, _)| score > s + 1e-12 * w_total) {
            let mid = lo + (hi - lo) / 2.0;
            let threshold = if mid < hi { mid } else { lo };
            best = Some((score, threshold));
        }
    }
    best
}

/// Whether `a` beats `b`: higher score, or an equal score (within rounding)
/// at a lower (feature, threshold).
fn better(a: &SplitChoice, b: &SplitChoice, tol: f64) -> bool {
    if a.score > b.score + tol {
        return true;
    }
    if (a.score - b.score).abs() <= tol {
        return (a.feature, a.threshold) < (b.feature, b.threshold);
    }
    false
}

/// Best split of `samples` over the features visited in `order`, stopping
/// once `max_features` non-constant features have been evaluated.
pub fn best_split(
    data: &Dataset,
    weights: &[f64],
    samples: &[usize],
    order: &[usize],
    max_features: usize,
) -> Option<SplitChoice> {
    let w_total: f64 = samples.iter().map(|&i| weights[i]).sum();
    let tol = 1e-12 * w_total;
    let mut best: Option<SplitChoice> = None;
    let mut evaluated = 0;
    for &feature in order {
        if evaluated >= max_features {
            break;
        }
        let Some((score, threshold)) = best_threshold(data, weights, samples, feature) else { continue };
        evaluated += 1;
        let choice = SplitChoice { feature, threshold, score };
        if best.as_ref().is_none_or(|b| better(&choice, b, tol)) {
            best = Some(choice);
        }
    }
    best
}

impl Tree {
    /// Grows a tree on the samples with positive weight.
    pub fn fit(data: &Dataset, weights: &[f64], max_features: usize, rng: &mut impl Rng) -> Tree {
        let n_features = data.n_features();
        let max_features = max_features.clamp(1, n_features.max(1));
        let mut nodes: Vec<Node> = Vec::new();
        let mut importances = vec![0.0; n_features];
        let root: Vec<usize> = (0..data.len()).filter(|&i| weights[i] > 0.0).collect();
        let mut order: Vec<usize> = (0..n_features).collect();

        nodes.push(Node::Leaf { distribution: Vec::new() });
        let mut stack = vec![(0usize, root)];
        while let Some((slot, samples)) = stack.pop() {
            let totals = class_totals(data, weights, &samples);
            let w: f64 = totals.iter().sum();
            let pure = totals.iter().filter(|&&t| t > 0.0).count() <= 1;
            let split = if pure || samples.len() < 2 {
                None
            } else {
                order.shuffle(rng);
                best_split(data, weights, &samples, &order, max_features)
            };
            let Some(choice) = split else {
                nodes[slot] = Node::Leaf { distribution: totals.iter().map(|t| t / w).collect() };
                continue;
            };
            importances[choice.feature] += choice.score - sum_sq_over(&totals, w);
            let column = &data.columns[choice.feature];
            let (l, r): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&i| column[i] <= choice.threshold);
            let (left, right) = (nodes.len(), nodes.len() + 1);
            nodes.push(Node::Leaf { distribution: Vec::new() });
            nodes.push(Node::Leaf { distribution: Vec::new() });
            nodes[slot] = Node::Split { feature: choice.feature, threshold: choice.threshold, left, right };
            stack.push((right, r));
            stack.push((left, l));
        }
        let total: f64 = importances.iter().sum();
        if total > 0.0 {
            for v in &mut importances {
                *v /= total;
            }
        }
        Tree { nodes, importances }
    }

    pub fn leaf(&self, x: &[f64]) -> &[f64] {
        let mut k = 0;
        loop {
            match &self.nodes[k] {
                Node::Leaf { distribution } => return distribution,
                Node::Split { feature, threshold, left, right } => {
                    k = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], k: usize) -> usize {
            match &nodes[k] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }
}
