use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{argmax, Dataset, LearnerError};

/// Anything SAMME can boost.
pub trait BaseLearner {
    type Model;
    fn fit(&self, data: &Dataset, weights: &[f64], seed: u64) -> Self::Model;
    fn predict(&self, model: &Self::Model, x: &[f64]) -> usize;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Boosted<M> {
    pub stages: Vec<(f64, M)>,
    pub n_classes: usize,
}

impl<M> Boosted<M> {
    pub fn predict_with<L: BaseLearner<Model = M>>(&self, learner: &L, x: &[f64]) -> usize {
        let mut votes = vec![0.0; self.n_classes];
        for (alpha, m) in &self.stages {
            votes[learner.predict(m, x)] += alpha;
        }
        argmax(&votes)
    }
}

/// Discrete multi-class AdaBoost (SAMME).
///
/// Stage weights are `ln((1−e)/e) + ln(K−1)` for weighted training error `e`
/// over `K` classes. A perfect stage is kept with weight 1 and ends boosting;
/// a stage no better than chance, `e ≥ (K−1)/K`, is discarded and ends it.
/// Weights handed to the learner always sum to the sample count.
pub fn samme<L: BaseLearner>(
    learner: &L,
    data: &Dataset,
    initial_weights: &[f64],
    max_stages: usize,
    seed: u64,
) -> Result<Boosted<L::Model>, LearnerError> {
    let n = data.len();
    let k = data.classes_present();
    let chance = (k as f64 - 1.0) / k as f64;
    let mut w = initial_weights.to_vec();
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut stages = Vec::new();

    for stage in 0..max_stages {
        let total: f64 = w.iter().sum();
        let scaled: Vec<f64> = w.iter().map(|v| v * n as f64 / total).collect();
        let model = learner.fit(data, &scaled, master.random());
        let wrong: Vec<bool> = (0..n).map(|i| learner.predict(&model, &data.row(i)) != data.labels[i]).collect();
        let err = wrong.iter().zip(&scaled).filter(|(m, _)| **m).map(|(_, v)| v).sum::<f64>() / n as f64;

        if err <= 0.0 {
            stages.push((1.0, model));
            break;
        }
        if err >= chance - 1e-12 {
            if stage == 0 {
                return Err(LearnerError::WorseThanChance(err));
            }
            break;
        }
        let alpha = ((1.0 - err) / err).ln() + (k as f64 - 1.0).ln();
        stages.push((alpha, model));
        let boost = alpha.exp();
        for i in 0..n {
            w[i] = if wrong[i] { scaled[i] * boost } else { scaled[i] };
        }
    }
    Ok(Boosted { stages, n_classes: data.n_classes() })
}
