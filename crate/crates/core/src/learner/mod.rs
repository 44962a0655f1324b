//! CART, random forest with balanced-subsample weights, SAMME boosting and
//! the cross-validation protocols.

mod boost;
mod cv;
mod dataset;
mod forest;
mod model;
mod tree;

pub use boost::{samme, BaseLearner, Boosted};
pub use cv::{kfold_cv, kfold_partition, loso_cv, CvMode, CvReport, FoldResult};
pub use dataset::Dataset;
pub use forest::{argmax, balanced_bootstrap, Forest};
pub use model::{
    feature_importance, fit_boosted, fit_forest, fit_tree, ClassWeightMode, ForestConfig, ForestLearner, ForestModel,
    Stage, MODEL_VERSION,
};
pub use tree::{best_split, Node, SplitChoice, Tree};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error("empty dataset")]
    Empty,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("first boosting stage error {0:.4} is no better than chance")]
    WorseThanChance(f64),
    #[error("protocol: {0}")]
    Protocol(String),
    #[error("model document: {0}")]
    Format(String),
}
