use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::tree::{DecisionTree, TreeConfig};
use super::LearnError;
use crate::datasets::{Label, PairDataset};
use crate::features::N_FEATURES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub features_per_split: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_leaf: 1,
            // ceil(sqrt(16))
            features_per_split: 4,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<(), LearnError> {
        if self.n_trees == 0 {
            return Err(LearnError::InvalidParams(
                "n_trees must be at least 1".into(),
            ));
        }
        if self.min_leaf == 0 {
            return Err(LearnError::InvalidParams(
                "min_leaf must be at least 1".into(),
            ));
        }
        if !(1..=N_FEATURES).contains(&self.features_per_split) {
            return Err(LearnError::InvalidParams(format!(
                "features_per_split must be in 1..={N_FEATURES}"
            )));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ForestParams { seed, ..self }
    }
}

/// Generator for tree `index`: the forest seed picks the key and the tree
/// index picks the stream, so trees draw independent sequences.
pub(crate) fn tree_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    params: ForestParams,
    features: Vec<usize>,
    trees: Vec<DecisionTree>,
}

/// Train on bootstrap samples, restricted to `features` (zero-based).
/// Trees are grown in parallel; the result does not depend on scheduling.
pub fn train_forest(
    ds: &PairDataset,
    params: &ForestParams,
    features: &[usize],
) -> Result<RandomForest, LearnError> {
    params.validate()?;
    if ds.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let mut features = features.to_vec();
    features.sort_unstable();
    features.dedup();
    if features.is_empty() {
        return Err(LearnError::EmptyFeatureSubset);
    }
    if let Some(&f) = features.iter().find(|&&f| f >= N_FEATURES) {
        return Err(LearnError::InvalidParams(format!(
            "feature index {f} out of range"
        )));
    }
    let x: Vec<[f64; N_FEATURES]> = ds.instances.iter().map(|i| *i.features()).collect();
    let y: Vec<Label> = ds.instances.iter().map(|i| i.label).collect();
    let cfg = TreeConfig {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        features_per_split: params.features_per_split.min(features.len()),
    };
    let n = x.len();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(params.seed, t);
            let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            DecisionTree::fit(&x, &y, &rows, &features, cfg, &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RandomForest {
        params: *params,
        features,
        trees,
    })
}

impl RandomForest {
    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn features(&self) -> &[usize] {
        &self.features
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Mean of the trees' leaf distributions, `[P(Same), P(Different)]`.
    pub fn predict_proba(&self, x: &[f64; N_FEATURES]) -> [f64; 2] {
        let mut sum = [0.0; 2];
        for t in &self.trees {
            let p = t.predict_proba(x);
            sum[0] += p[0];
            sum[1] += p[1];
        }
        let n = self.trees.len() as f64;
        [sum[0] / n, sum[1] / n]
    }

    /// Most probable label; an exact tie goes to `Same`.
    pub fn predict(&self, x: &[f64; N_FEATURES]) -> Label {
        let p = self.predict_proba(x);
        if p[0] >= p[1] {
            Label::Same
        } else {
            Label::Different
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "params": self.params,
            "seed": self.params.seed,
            "features": self.features,
            "trees": self.trees.iter().map(DecisionTree::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string(&self.to_json()).expect("forest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(value: &Value) -> Result<Self, LearnError> {
        let bad = |m: &str| LearnError::Format(m.into());
        let params: ForestParams = serde_json::from_value(value["params"].clone())
            .map_err(|e| LearnError::Format(e.to_string()))?;
        params.validate()?;
        if value["seed"].as_u64() != Some(params.seed) {
            return Err(bad("seed disagrees with params"));
        }
        let features = value["features"]
            .as_array()
            .ok_or_else(|| bad("missing features"))?
            .iter()
            .map(|f| {
                f.as_u64()
                    .map(|f| f as usize)
                    .filter(|&f| f < N_FEATURES)
                    .ok_or_else(|| bad("bad feature index"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let trees = value["trees"]
            .as_array()
            .ok_or_else(|| bad("missing trees"))?
            .iter()
            .map(DecisionTree::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        if trees.is_empty() {
            return Err(bad("forest has no trees"));
        }
        Ok(RandomForest {
            params,
            features,
            trees,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, LearnError> {
        let v: Value = serde_json::from_str(text).map_err(|e| LearnError::Format(e.to_string()))?;
        Self::from_json(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::PairInstance;
    use crate::features::PairVector;

    fn planted(n: usize, seed: u64) -> PairDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instances = (0..n)
            .map(|i| {
                let mut deltas: [f64; N_FEATURES] =
                    std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                let label = if i % 2 == 0 {
                    Label::Different
                } else {
                    Label::Same
                };
                deltas[0] = match label {
                    Label::Different => rng.gen_range(0.1..1.0),
                    Label::Same => rng.gen_range(-1.0..-0.1),
                };
                PairInstance {
                    vector: PairVector {
                        id_a: format!("a{i}"),
                        id_b: format!("b{i}"),
                        deltas,
                    },
                    label,
                }
            })
            .collect();
        PairDataset {
            instances,
            provenance: None,
        }
    }

    fn all() -> Vec<usize> {
        (0..N_FEATURES).collect()
    }

    #[test]
    fn separable_data_fits_perfectly() {
        let ds = planted(120, 1);
        let f = train_forest(&ds, &ForestParams::default(), &all()).unwrap();
        for inst in &ds.instances {
            assert_eq!(f.predict(inst.features()), inst.label);
        }
        let held_out = planted(40, 99);
        let correct = held_out
            .instances
            .iter()
            .filter(|i| f.predict(i.features()) == i.label)
            .count();
        assert!(correct >= 38, "{correct}/40");
    }

    #[test]
    fn same_seed_same_forest() {
        let ds = planted(60, 2);
        let p = ForestParams {
            n_trees: 15,
            ..ForestParams::default()
        };
        let a = train_forest(&ds, &p, &all()).unwrap();
        let b = train_forest(&ds, &p, &all()).unwrap();
        assert_eq!(a, b);
        let c = train_forest(&ds, &p.with_seed(5), &all()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn depth_zero_single_tree_is_majority_of_bootstrap() {
        let ds = planted(31, 3);
        let p = ForestParams {
            n_trees: 1,
            max_depth: Some(0),
            ..ForestParams::default()
        };
        let f = train_forest(&ds, &p, &all()).unwrap();
        assert_eq!(f.trees()[0].nodes().len(), 1);
        let first = f.predict(ds.instances[0].features());
        assert!(ds
            .instances
            .iter()
            .all(|i| f.predict(i.features()) == first));
    }

    #[test]
    fn tie_goes_to_same() {
        let leaf = |s: u32, d: u32| DecisionTree::from_json(&json!([s, d])).unwrap();
        let f = RandomForest {
            params: ForestParams {
                n_trees: 2,
                ..ForestParams::default()
            },
            features: vec![0],
            trees: vec![leaf(3, 0), leaf(0, 5)],
        };
        assert_eq!(f.predict(&[0.0; N_FEATURES]), Label::Same);
        let g = RandomForest {
            trees: vec![leaf(0, 1)],
            ..f
        };
        assert_eq!(g.predict(&[0.0; N_FEATURES]), Label::Different);
    }

    #[test]
    fn json_round_trip_predicts_identically() {
        let ds = planted(50, 4);
        let p = ForestParams {
            n_trees: 10,
            ..ForestParams::default()
        };
        let f = train_forest(&ds, &p, &[0, 3, 7]).unwrap();
        let back = RandomForest::from_json_str(&f.to_json_string()).unwrap();
        assert_eq!(back, f);
        for inst in &planted(30, 5).instances {
            assert_eq!(
                back.predict_proba(inst.features()),
                f.predict_proba(inst.features())
            );
        }
    }

    #[test]
    fn parameter_checks() {
        let ds = planted(10, 6);
        let bad = ForestParams {
            features_per_split: 17,
            ..ForestParams::default()
        };
        assert!(matches!(
            train_forest(&ds, &bad, &all()),
            Err(LearnError::InvalidParams(_))
        ));
        assert!(matches!(
            train_forest(&PairDataset::default(), &ForestParams::default(), &all()),
            Err(LearnError::EmptyDataset)
        ));
        assert!(matches!(
            train_forest(&ds, &ForestParams::default(), &[]),
            Err(LearnError::EmptyFeatureSubset)
        ));
    }
}
