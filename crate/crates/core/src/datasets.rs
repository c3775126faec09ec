//! Labelled pairwise datasets.
//!
//! Two construction styles are supported: every pair of human-rated
//! articles labelled by a score-difference threshold, and sampled pairs
//! from a corpus of aligned complex/simple article versions.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::features::{pair_difference, FeatureVector, PairVector, FEATURE_CODES, N_FEATURES};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("need at least two scored articles, got {0}")]
    TooFewArticles(usize),
    #[error("threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),
    #[error("not enough articles: need {needed}, have {available}")]
    InsufficientArticles { needed: usize, available: usize },
    #[error("dataset header mismatch: `{0}`")]
    SchemaMismatch(String),
    #[error("dataset line {line}: {detail}")]
    Row { line: usize, detail: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Same,
    Different,
}

impl Label {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Label {
        if i == 0 {
            Label::Same
        } else {
            Label::Different
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Same => "same",
            Label::Different => "different",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "same" => Ok(Label::Same),
            "different" => Ok(Label::Different),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Threshold,
    Aligned,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairInstance {
    pub vector: PairVector,
    pub label: Label,
}

impl PairInstance {
    pub fn id_a(&self) -> &str {
        &self.vector.id_a
    }

    pub fn id_b(&self) -> &str {
        &self.vector.id_b
    }

    pub fn features(&self) -> &[f64; N_FEATURES] {
        &self.vector.deltas
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairDataset {
    pub instances: Vec<PairInstance>,
    /// Unknown for datasets read back from CSV.
    pub provenance: Option<Provenance>,
}

impl PairDataset {
    pub fn feature_names(&self) -> &'static [&'static str; N_FEATURES] {
        &FEATURE_CODES
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// `[#Same, #Different]`.
    pub fn label_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for inst in &self.instances {
            counts[inst.label.index()] += 1;
        }
        counts
    }

    pub fn subset(&self, rows: &[usize]) -> PairDataset {
        PairDataset {
            instances: rows.iter().map(|&i| self.instances[i].clone()).collect(),
            provenance: self.provenance,
        }
    }
}

/// Slack for comparing score gaps: ratings are short decimals, so
/// `3.2 - 2.5` must count as a gap of exactly 0.7.
pub const SCORE_TOLERANCE: f64 = 1e-9;

fn within(gap: f64, threshold: f64) -> bool {
    gap <= threshold + SCORE_TOLERANCE
}

/// All unordered pairs of scored articles, oriented in input order. A pair
/// is `Same` when its scores differ by at most `threshold`.
pub fn build_threshold_pairs(
    scored: &[(&FeatureVector, f64)],
    threshold: f64,
) -> Result<PairDataset, DatasetError> {
    if scored.len() < 2 {
        return Err(DatasetError::TooFewArticles(scored.len()));
    }
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(DatasetError::NonPositiveThreshold(threshold));
    }
    let mut instances = Vec::with_capacity(scored.len() * (scored.len() - 1) / 2);
    for (i, &(va, sa)) in scored.iter().enumerate() {
        for &(vb, sb) in &scored[i + 1..] {
            let label = if within((sa - sb).abs(), threshold) {
                Label::Same
            } else {
                Label::Different
            };
            instances.push(PairInstance {
                vector: pair_difference(va, vb),
                label,
            });
        }
    }
    Ok(PairDataset {
        instances,
        provenance: Some(Provenance::Threshold),
    })
}

/// Candidate thresholds for [`balance_threshold`]: midpoints between
/// consecutive values of `{0} ∪ gaps ∪ {max_gap + 1}`, ascending. Gaps
/// closer than [`SCORE_TOLERANCE`] count as one.
pub fn threshold_candidates(scores: &[f64]) -> Vec<f64> {
    let mut cuts = vec![0.0];
    for (i, a) in scores.iter().enumerate() {
        for b in &scores[i + 1..] {
            cuts.push((a - b).abs());
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|b, a| *b - *a <= SCORE_TOLERANCE);
    let top = *cuts.last().expect("non-empty");
    cuts.push(top + 1.0);
    cuts.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect()
}

/// Threshold that makes `#Same` and `#Different` as equal as possible;
/// ties go to the smaller threshold.
pub fn balance_threshold(scores: &[f64]) -> Result<f64, DatasetError> {
    if scores.len() < 2 {
        return Err(DatasetError::TooFewArticles(scores.len()));
    }
    let mut gaps: Vec<f64> = Vec::new();
    for (i, a) in scores.iter().enumerate() {
        for b in &scores[i + 1..] {
            gaps.push((a - b).abs());
        }
    }
    gaps.sort_by(f64::total_cmp);
    let total = gaps.len();
    let mut best: Option<(usize, f64)> = None;
    for t in threshold_candidates(scores) {
        let same = gaps.partition_point(|&g| within(g, t));
        let imbalance = same.abs_diff(total - same);
        if best.is_none_or(|(b, _)| imbalance < b) {
            best = Some((imbalance, t));
        }
    }
    Ok(best.expect("at least one candidate").1)
}

/// Balanced dataset from aligned (complex, simple) article versions.
///
/// `Different` instances are sampled aligned pairs. `Same` instances are
/// sampled pairs of distinct complex articles (half, rounded up) and of
/// distinct simple articles (the rest). All draws are without replacement
/// from a generator seeded with `seed`.
pub fn build_aligned_pairs(
    aligned: &[(&FeatureVector, &FeatureVector)],
    pairs_per_class: usize,
    seed: u64,
) -> Result<PairDataset, DatasetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let need = |needed: usize, available: usize| {
        if needed > available {
            Err(DatasetError::InsufficientArticles { needed, available })
        } else {
            Ok(())
        }
    };

    need(pairs_per_class, aligned.len())?;
    let complex = distinct_by_id(aligned.iter().map(|p| p.0));
    let simple = distinct_by_id(aligned.iter().map(|p| p.1));
    let n_cc = pairs_per_class.div_ceil(2);
    let n_ss = pairs_per_class / 2;
    need(n_cc, n_choose_2(complex.len()))?;
    need(n_ss, n_choose_2(simple.len()))?;

    let mut instances = Vec::with_capacity(2 * pairs_per_class);
    for (pool, n) in [(&complex, n_cc), (&simple, n_ss)] {
        let mut picks = index::sample(&mut rng, n_choose_2(pool.len()), n).into_vec();
        picks.sort_unstable();
        for k in picks {
            let (i, j) = unrank_pair(k, pool.len());
            instances.push(PairInstance {
                vector: pair_difference(pool[i], pool[j]),
                label: Label::Same,
            });
        }
    }
    let mut picks = index::sample(&mut rng, aligned.len(), pairs_per_class).into_vec();
    picks.sort_unstable();
    for k in picks {
        let (c, s) = aligned[k];
        instances.push(PairInstance {
            vector: pair_difference(c, s),
            label: Label::Different,
        });
    }
    Ok(PairDataset {
        instances,
        provenance: Some(Provenance::Aligned),
    })
}

fn distinct_by_id<'a>(vectors: impl Iterator<Item = &'a FeatureVector>) -> Vec<&'a FeatureVector> {
    let mut seen = HashSet::new();
    vectors
        .filter(|v| seen.insert(v.article_id.as_str()))
        .collect()
}

fn n_choose_2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Map `k` in `0..C(n,2)` to the `k`-th pair `(i, j)`, `i < j`, in
/// lexicographic order.
fn unrank_pair(mut k: usize, n: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
    }
    unreachable!("pair rank out of range")
}

fn header() -> Vec<&'static str> {
    ["id_a", "id_b", "label"]
        .into_iter()
        .chain(FEATURE_CODES)
        .collect()
}

/// CSV with header `id_a,id_b,label,f1..f16`. Values use the shortest
/// representation that reads back to the same `f64`.
pub fn write_dataset<W: Write>(out: W, ds: &PairDataset) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header())?;
    for inst in &ds.instances {
        let mut row = vec![
            inst.id_a().to_string(),
            inst.id_b().to_string(),
            inst.label.to_string(),
        ];
        row.extend(inst.features().iter().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset<R: Read>(input: R) -> Result<PairDataset, DatasetError> {
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header() {
        return Err(DatasetError::SchemaMismatch(found.join(",")));
    }
    let mut seen = HashSet::new();
    let mut instances = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let row_err = |detail: String| DatasetError::Row { line, detail };
        let (a, b) = (record[0].to_string(), record[1].to_string());
        if a == b {
            return Err(row_err(format!("article `{a}` paired with itself")));
        }
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        if !seen.insert(key) {
            return Err(row_err(format!("duplicate pair ({a}, {b})")));
        }
        let label: Label = record[2]
            .parse()
            .map_err(|_| row_err(format!("bad label `{}`", &record[2])))?;
        let mut deltas = [0.0; N_FEATURES];
        for (slot, field) in deltas.iter_mut().zip(record.iter().skip(3)) {
            *slot = field
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| row_err(format!("bad value `{field}`")))?;
        }
        instances.push(PairInstance {
            vector: PairVector {
                id_a: a,
                id_b: b,
                deltas,
            },
            label,
        });
    }
    Ok(PairDataset {
        instances,
        provenance: None,
    })
}
