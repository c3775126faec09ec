use super::LearnError;
use crate::datasets::{Label, PairDataset};

/// Shannon entropy in bits of a binary class distribution.
pub fn entropy(counts: [usize; 2]) -> Result<f64, LearnError> {
    let total = counts[0] + counts[1];
    if total == 0 {
        return Err(LearnError::EmptyCounts);
    }
    Ok(entropy_unchecked(counts, total))
}

pub(crate) fn entropy_unchecked(counts: [usize; 2], total: usize) -> f64 {
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub threshold: f64,
    pub gain: f64,
}

/// Best threshold over `(value, label)` points already sorted by value.
/// Candidates are midpoints between consecutive distinct values that leave
/// at least `min_leaf` points on each side. Ties keep the smaller threshold.
pub(crate) fn best_sorted_split(points: &[(f64, Label)], min_leaf: usize) -> Option<Split> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let mut total = [0usize; 2];
    for &(_, y) in points {
        total[y.index()] += 1;
    }
    let parent = entropy_unchecked(total, n);
    let mut left = [0usize; 2];
    let mut best: Option<Split> = None;
    for i in 0..n - 1 {
        left[points[i].1.index()] += 1;
        let (lo, hi) = (points[i].0, points[i + 1].0);
        if lo >= hi {
            continue;
        }
        let n_left = i + 1;
        let n_right = n - n_left;
        if n_left < min_leaf || n_right < min_leaf {
            continue;
        }
        let right = [total[0] - left[0], total[1] - left[1]];
        let children = (n_left as f64 * entropy_unchecked(left, n_left)
            + n_right as f64 * entropy_unchecked(right, n_right))
            / n as f64;
        let gain = (parent - children).max(0.0);
        if best.is_none_or(|b| gain > b.gain) {
            best = Some(Split {
                threshold: midpoint(lo, hi),
                gain,
            });
        }
    }
    best
}

/// Midpoint that still separates `lo` from `hi` after rounding.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid >= hi || mid < lo {
        lo
    } else {
        mid
    }
}

pub(crate) fn sorted_points(values: impl Iterator<Item = (f64, Label)>) -> Vec<(f64, Label)> {
    let mut points: Vec<(f64, Label)> = values.collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    points
}

/// Information-gain maximising threshold for one feature of a dataset.
pub fn best_split(ds: &PairDataset, feature: usize) -> Result<Split, LearnError> {
    if ds.len() < 2 {
        return Err(LearnError::TooFewInstances {
            needed: 2,
            got: ds.len(),
        });
    }
    let points = sorted_points(
        ds.instances
            .iter()
            .map(|inst| (inst.features()[feature], inst.label)),
    );
    best_sorted_split(&points, 1).ok_or(LearnError::ConstantFeature(feature))
}
