use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::forest::{train_forest, ForestParams};
use super::LearnError;
use crate::datasets::{Label, PairDataset};

#[derive(Debug, Clone, PartialEq)]
pub struct CVResult {
    pub fold_accuracies: Vec<f64>,
    pub mean: f64,
    /// Zero-based feature indices; empty for the majority baseline.
    pub feature_subset: Vec<usize>,
}

/// Assign every row to one of `k` folds. Rows of each class are shuffled
/// and dealt round-robin, the dealer carrying on from one class to the
/// next, so fold sizes and per-class fold counts each differ by at most 1.
pub fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut dealt = 0;
    for class in [Label::Same, Label::Different] {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rows.shuffle(&mut rng);
        for r in rows {
            folds[dealt % k].push(r);
            dealt += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    folds
}

fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn majority(ds: &PairDataset) -> Label {
    let [same, different] = ds.label_counts();
    if same >= different {
        Label::Same
    } else {
        Label::Different
    }
}

/// Stratified k-fold accuracy of a forest restricted to `features`. An empty
/// feature list evaluates the majority-class baseline instead.
pub fn cross_validate(
    ds: &PairDataset,
    params: &ForestParams,
    features: &[usize],
    k: usize,
) -> Result<CVResult, LearnError> {
    params.validate()?;
    if k < 2 {
        return Err(LearnError::InvalidParams("need at least 2 folds".into()));
    }
    if ds.len() < k {
        return Err(LearnError::TooFewInstances {
            needed: k,
            got: ds.len(),
        });
    }
    let labels: Vec<Label> = ds.instances.iter().map(|i| i.label).collect();
    let folds = stratified_folds(&labels, k, params.seed);
    let mut fold_accuracies = Vec::with_capacity(k);
    for (f, test_rows) in folds.iter().enumerate() {
        let train_rows: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, rows)| rows.iter().copied())
            .collect();
        let train = ds.subset(&train_rows);
        let correct = if features.is_empty() {
            let guess = majority(&train);
            test_rows.iter().filter(|&&r| labels[r] == guess).count()
        } else {
            let forest = train_forest(
                &train,
                &params.with_seed(fold_seed(params.seed, f)),
                features,
            )?;
            test_rows
                .iter()
                .filter(|&&r| forest.predict(ds.instances[r].features()) == labels[r])
                .count()
        };
        fold_accuracies.push(correct as f64 / test_rows.len() as f64);
    }
    let mean = fold_accuracies.iter().sum::<f64>() / k as f64;
    let mut feature_subset = features.to_vec();
    feature_subset.sort_unstable();
    feature_subset.dedup();
    Ok(CVResult {
        fold_accuracies,
        mean,
        feature_subset,
    })
}
