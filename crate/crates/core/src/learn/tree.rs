use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use super::split::{best_sorted_split, sorted_points};
use super::LearnError;
use crate::datasets::Label;
use crate::features::N_FEATURES;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        /// `[#Same, #Different]` among the training rows reaching this leaf.
        counts: [u32; 2],
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub features_per_split: usize,
}

/// Binary decision tree stored as an arena; node 0 is the root. Rows with
/// `value <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

struct Builder<'a, R> {
    x: &'a [[f64; N_FEATURES]],
    y: &'a [Label],
    features: &'a [usize],
    cfg: TreeConfig,
    rng: &'a mut R,
    nodes: Vec<Node>,
}

impl<R: Rng> Builder<'_, R> {
    fn grow(&mut self, rows: &[usize], depth: usize) -> usize {
        let mut counts = [0u32; 2];
        for &r in rows {
            counts[self.y[r].index()] += 1;
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });

        let pure = counts[0] == 0 || counts[1] == 0;
        let depth_capped = self.cfg.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || rows.len() < 2 * self.cfg.min_leaf {
            return id;
        }
        let Some((feature, threshold)) = self.choose_split(rows) else {
            return id;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| self.x[r][feature] <= threshold);
        let left = self.grow(&left_rows, depth + 1);
        let right = self.grow(&right_rows, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    /// Best split among a fresh random draw of `features_per_split`
    /// candidates. If none of them can split the node, the remaining
    /// features are tried in the same shuffled order until one can.
    fn choose_split(&mut self, rows: &[usize]) -> Option<(usize, f64)> {
        let mut order = self.features.to_vec();
        order.shuffle(self.rng);
        let mut best: Option<(usize, f64, f64)> = None;
        for (k, &f) in order.iter().enumerate() {
            if k >= self.cfg.features_per_split && best.is_some() {
                break;
            }
            let points = sorted_points(rows.iter().map(|&r| (self.x[r][f], self.y[r])));
            if let Some(s) = best_sorted_split(&points, self.cfg.min_leaf) {
                if best.is_none_or(|(_, _, g)| s.gain > g) {
                    best = Some((f, s.threshold, s.gain));
                }
            }
        }
        best.map(|(f, t, _)| (f, t))
    }
}

impl DecisionTree {
    /// Grow a tree on `rows` (repeats allowed, as in a bootstrap sample)
    /// using only the listed feature indices.
    pub fn fit<R: Rng>(
        x: &[[f64; N_FEATURES]],
        y: &[Label],
        rows: &[usize],
        features: &[usize],
        cfg: TreeConfig,
        rng: &mut R,
    ) -> Result<Self, LearnError> {
        if rows.is_empty() {
            return Err(LearnError::EmptyDataset);
        }
        if features.is_empty() {
            return Err(LearnError::EmptyFeatureSubset);
        }
        let mut b = Builder {
            x,
            y,
            features,
            cfg,
            rng,
            nodes: Vec::new(),
        };
        b.grow(rows, 0);
        Ok(DecisionTree { nodes: b.nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn leaf_counts(&self, x: &[f64; N_FEATURES]) -> [u32; 2] {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// `[P(Same), P(Different)]` at the leaf `x` reaches.
    pub fn predict_proba(&self, x: &[f64; N_FEATURES]) -> [f64; 2] {
        let c = self.leaf_counts(x);
        let total = f64::from(c[0] + c[1]);
        if total == 0.0 {
            return [0.5, 0.5];
        }
        [f64::from(c[0]) / total, f64::from(c[1]) / total]
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Nested arrays: a leaf is `[same, different]`, a split is
    /// `[feature, threshold, left, right]`.
    pub fn to_json(&self) -> Value {
        fn enc(nodes: &[Node], at: usize) -> Value {
            match nodes[at] {
                Node::Leaf { counts } => json!([counts[0], counts[1]]),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => json!([feature, threshold, enc(nodes, left), enc(nodes, right)]),
            }
        }
        enc(&self.nodes, 0)
    }

    pub fn from_json(value: &Value) -> Result<Self, LearnError> {
        fn dec(v: &Value, nodes: &mut Vec<Node>) -> Result<usize, LearnError> {
            let bad = || LearnError::Format("malformed tree node".into());
            let arr = v.as_array().ok_or_else(bad)?;
            let id = nodes.len();
            match arr.len() {
                2 => {
                    let c = |i: usize| {
                        arr[i]
                            .as_u64()
                            .and_then(|c| u32::try_from(c).ok())
                            .ok_or_else(bad)
                    };
                    nodes.push(Node::Leaf {
                        counts: [c(0)?, c(1)?],
                    });
                }
                4 => {
                    let feature = arr[0]
                        .as_u64()
                        .map(|f| f as usize)
                        .filter(|&f| f < N_FEATURES)
                        .ok_or_else(bad)?;
                    let threshold = arr[1].as_f64().ok_or_else(bad)?;
                    nodes.push(Node::Leaf { counts: [0, 0] });
                    let left = dec(&arr[2], nodes)?;
                    let right = dec(&arr[3], nodes)?;
                    nodes[id] = Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    };
                }
                _ => return Err(bad()),
            }
            Ok(id)
        }
        let mut nodes = Vec::new();
        dec(value, &mut nodes)?;
        Ok(DecisionTree { nodes })
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn cfg(max_depth: Option<usize>) -> TreeConfig {
        TreeConfig {
            max_depth,
            min_leaf: 1,
            features_per_split: N_FEATURES,
        }
    }

    fn row(vals: &[f64]) -> [f64; N_FEATURES] {
        let mut r = [0.0; N_FEATURES];
        r[..vals.len()].copy_from_slice(vals);
        r
    }

    fn xor_data() -> (Vec<[f64; N_FEATURES]>, Vec<Label>) {
        let x = vec![
            row(&[0.0, 0.0]),
            row(&[0.0, 1.0]),
            row(&[1.0, 0.0]),
            row(&[1.0, 1.0]),
        ];
        let y = vec![Label::Same, Label::Different, Label::Different, Label::Same];
        (x, y)
    }

    #[test]
    fn zero_gain_splits_still_reach_purity() {
        let (x, y) = xor_data();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = DecisionTree::fit(&x, &y, &[0, 1, 2, 3], &[0, 1], cfg(None), &mut rng).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            let p = t.predict_proba(xi);
            assert_eq!(p[yi.index()], 1.0);
        }
    }

    #[test]
    fn depth_zero_is_majority() {
        let (x, mut y) = xor_data();
        y[0] = Label::Different;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = DecisionTree::fit(&x, &y, &[0, 1, 2, 3], &[0, 1], cfg(Some(0)), &mut rng).unwrap();
        assert_eq!(t.nodes().len(), 1);
        assert_eq!(t.predict_proba(&x[0]), [0.25, 0.75]);
    }

    #[test]
    fn json_round_trip() {
        let (x, y) = xor_data();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = DecisionTree::fit(&x, &y, &[0, 1, 2, 3, 3], &[0, 1], cfg(None), &mut rng).unwrap();
        let back = DecisionTree::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(DecisionTree::from_json(&json!([1, 2, 3])).is_err());
    }

    #[test]
    fn empty_inputs() {
        let (x, y) = xor_data();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            DecisionTree::fit(&x, &y, &[], &[0], cfg(None), &mut rng),
            Err(LearnError::EmptyDataset)
        ));
        assert!(matches!(
            DecisionTree::fit(&x, &y, &[0], &[], cfg(None), &mut rng),
            Err(LearnError::EmptyFeatureSubset)
        ));
    }
}
