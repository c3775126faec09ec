//! Entropy-split decision trees, random forests, stratified
//! cross-validation, Welch's t-test and information-gain ranking.

mod cv;
mod forest;
mod split;
mod tree;
mod ttest;

use thiserror::Error;

use crate::datasets::PairDataset;
use crate::features::N_FEATURES;

pub use cv::{cross_validate, stratified_folds, CVResult};
pub use forest::{train_forest, ForestParams, RandomForest};
pub use split::{best_split, entropy, Split};
pub use tree::{DecisionTree, Node, TreeConfig};
pub use ttest::{
    ln_gamma, regularized_incomplete_beta, student_t_two_tailed, welch_t_test, TTestResult,
    SIGNIFICANCE_LEVEL,
};

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("class counts are both zero")]
    EmptyCounts,
    #[error("feature f{} is constant", .0 + 1)]
    ConstantFeature(usize),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("feature subset is empty")]
    EmptyFeatureSubset,
    #[error("need at least {needed} instances, got {got}")]
    TooFewInstances { needed: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed model: {0}")]
    Format(String),
}

/// Per-feature information gain at each feature's best single threshold,
/// highest first; equal gains keep ascending feature order. Constant
/// features score 0.
pub fn rank_information_gain(ds: &PairDataset) -> Result<Vec<(usize, f64)>, LearnError> {
    if ds.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let mut ranked: Vec<(usize, f64)> = (0..N_FEATURES)
        .map(|f| match best_split(ds, f) {
            Ok(s) => Ok((f, s.gain)),
            Err(LearnError::ConstantFeature(_) | LearnError::TooFewInstances { .. }) => {
                Ok((f, 0.0))
            }
            Err(e) => Err(e),
        })
        .collect::<Result<_, _>>()?;
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}
