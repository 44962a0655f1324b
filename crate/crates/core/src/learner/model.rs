use log::warn;
use serde::{Deserialize, Serialize};

use super::boost::{samme, BaseLearner};
use super::{argmax, Dataset, Forest, LearnerError};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassWeightMode {
    BalancedSubsample,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_features_per_split: usize,
    pub class_weight_mode: ClassWeightMode,
    pub boosting_max_estimators: usize,
    pub rng_seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features_per_split: 5,
            class_weight_mode: ClassWeightMode::BalancedSubsample,
            boosting_max_estimators: 50,
            rng_seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self, n_features: usize) -> Result<(), LearnerError> {
        if self.n_trees == 0 || self.boosting_max_estimators == 0 {
            return Err(LearnerError::Config("n_trees and boosting_max_estimators must be ≥ 1".into()));
        }
        if self.max_features_per_split == 0 || self.max_features_per_split > n_features.max(1) {
            return Err(LearnerError::Config(format!(
                "max_features_per_split {} outside 1..={n_features}",
                self.max_features_per_split
            )));
        }
        Ok(())
    }
}

/// Random forest as a boosting base learner.
pub struct ForestLearner<'a>(pub &'a ForestConfig);

impl BaseLearner for ForestLearner<'_> {
    type Model = Forest;

    fn fit(&self, data: &Dataset, weights: &[f64], seed: u64) -> Forest {
        let c = self.0;
        let balanced = c.class_weight_mode == ClassWeightMode::BalancedSubsample;
        Forest::fit(data, weights, c.n_trees, c.max_features_per_split, balanced, seed)
    }

    fn predict(&self, model: &Forest, x: &[f64]) -> usize {
        model.predict(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub weight: f64,
    pub forest: Forest,
}

/// Boosted forest ensemble. `classes` holds the label values predictions
/// refer to; `constant_class` is set when training saw a single class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub model_version: u32,
    pub classes: Vec<u8>,
    pub n_features: usize,
    pub stages: Vec<Stage>,
    pub importances: Vec<f64>,
    pub constant_class: Option<usize>,
}

impl ForestModel {
    fn constant(data: &Dataset) -> Self {
        let class = data.labels.first().copied().unwrap_or(0);
        warn!(
            "training data holds a single class; model always predicts {}",
            data.classes.get(class).copied().unwrap_or(0)
        );
        Self {
            model_version: MODEL_VERSION,
            classes: data.classes.clone(),
            n_features: data.n_features(),
            stages: Vec::new(),
            importances: vec![1.0 / data.n_features().max(1) as f64; data.n_features()],
            constant_class: Some(class),
        }
    }

    fn from_stages(data: &Dataset, stages: Vec<Stage>) -> Self {
        let n = data.n_features();
        let mut importances = vec![0.0; n];
        let total_weight: f64 = stages.iter().map(|s| s.weight).sum();
        for s in &stages {
            for (acc, v) in importances.iter_mut().zip(s.forest.importances()) {
                *acc += s.weight * v / total_weight;
            }
        }
        let sum: f64 = importances.iter().sum();
        if sum > 0.0 {
            importances.iter_mut().for_each(|v| *v /= sum);
        } else {
            importances = vec![1.0 / n.max(1) as f64; n];
        }
        Self {
            model_version: MODEL_VERSION,
            classes: data.classes.clone(),
            n_features: n,
            stages,
            importances,
            constant_class: None,
        }
    }

    /// Class index (into `classes`) by stage-weighted vote.
    pub fn predict_index(&self, x: &[f64]) -> usize {
        if let Some(c) = self.constant_class {
            return c;
        }
        let mut votes = vec![0.0; self.classes.len()];
        for s in &self.stages {
            votes[s.forest.predict(x)] += s.weight;
        }
        argmax(&votes)
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        self.classes[self.predict_index(x)]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, LearnerError> {
        let model: Self = serde_json::from_str(text).map_err(|e| LearnerError::Format(e.to_string()))?;
        if model.model_version != MODEL_VERSION {
            return Err(LearnerError::Format(format!("unsupported model_version {}", model.model_version)));
        }
        Ok(model)
    }
}

/// A single forest (no boosting), stored as a one-stage model.
pub fn fit_forest(data: &Dataset, config: &ForestConfig) -> Result<ForestModel, LearnerError> {
    check(data, config)?;
    if data.classes_present() < 2 {
        return Ok(ForestModel::constant(data));
    }
    let forest = ForestLearner(config).fit(data, &vec![1.0; data.len()], config.rng_seed);
    Ok(ForestModel::from_stages(data, vec![Stage { weight: 1.0, forest }]))
}

/// SAMME-boosted forests.
pub fn fit_boosted(data: &Dataset, config: &ForestConfig) -> Result<ForestModel, LearnerError> {
    check(data, config)?;
    if data.classes_present() < 2 {
        return Ok(ForestModel::constant(data));
    }
    let learner = ForestLearner(config);
    let boosted = samme(&learner, data, &vec![1.0; data.len()], config.boosting_max_estimators, config.rng_seed)?;
    let stages = boosted.stages.into_iter().map(|(weight, forest)| Stage { weight, forest }).collect();
    Ok(ForestModel::from_stages(data, stages))
}

/// Stage-weighted mean impurity-decrease importances, summing to 1.
pub fn feature_importance(model: &ForestModel) -> Vec<f64> {
    model.importances.clone()
}

fn check(data: &Dataset, config: &ForestConfig) -> Result<(), LearnerError> {
    if data.is_empty() {
        return Err(LearnerError::Empty);
    }
    config.validate(data.n_features())
}

/// One CART tree on the given sample weights, sampling
/// `max_features_per_split` features per node.
pub fn fit_tree(data: &Dataset, weights: &[f64], config: &ForestConfig) -> super::Tree {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.rng_seed);
    super::Tree::fit(data, weights, config.max_features_per_split, &mut rng)
}
