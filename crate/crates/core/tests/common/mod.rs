#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use discomplex::corpus_io::{load_corpus, load_lexicon, Article};
use discomplex::datasets::{Label, PairDataset, PairInstance};
use discomplex::discourse_stats::{EventKind, ProbabilityModel};
use discomplex::features::{ExtractionContext, PairVector, N_FEATURES};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini")
}

pub fn fixture(name: &str) -> PathBuf {
    fixture_dir().join(name)
}

pub fn aligned_articles() -> Vec<Article> {
    load_corpus(fixture("aligned.tsv")).expect("aligned fixture loads")
}

pub fn rated_articles() -> Vec<Article> {
    load_corpus(fixture("rated.tsv")).expect("rated fixture loads")
}

/// Models fitted on the aligned fixture, with the fixture lexicons.
pub fn fixture_context() -> ExtractionContext {
    let train = aligned_articles();
    let models = EventKind::ALL.map(|k| ProbabilityModel::fit(&train, k, 1.0).unwrap());
    ExtractionContext::new(
        models,
        load_lexicon(fixture("synonyms.tsv")).unwrap(),
        load_lexicon(fixture("frequencies.tsv")).unwrap(),
    )
    .unwrap()
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_cli<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = Command::new(env!("CARGO_BIN_EXE_discomplex"))
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// The full fixture pipeline into `out`, stopping at the first failure.
pub fn run_pipeline(out: &Path, seed: &str) -> Vec<Output> {
    let f = |n: &str| fixture(n).into_os_string();
    let out = out.as_os_str().to_owned();
    let steps: Vec<Vec<std::ffi::OsString>> = vec![
        vec!["fit-stats".into(), "--manifest".into(), f("aligned.tsv")],
        vec![
            "extract".into(),
            "--manifest".into(),
            f("aligned.tsv"),
            "--synonyms".into(),
            f("synonyms.tsv"),
            "--frequencies".into(),
            f("frequencies.tsv"),
        ],
        vec![
            "pair".into(),
            "--manifest".into(),
            f("aligned.tsv"),
            "--mode".into(),
            "aligned".into(),
            "--alignment".into(),
            f("alignment.tsv"),
            "--pairs-per-class".into(),
            "40".into(),
        ],
        vec!["evaluate".into()],
        vec!["rank".into()],
    ];
    let mut outputs = Vec::new();
    for mut step in steps {
        step.extend(["--out".into(), out.clone(), "--seed".into(), seed.into()]);
        let o = run_cli(&step);
        let ok = o.code == 0;
        outputs.push(o);
        if !ok {
            break;
        }
    }
    outputs
}

/// Balanced dataset with signal on feature `signal` and `noise` label flips.
pub fn planted_dataset(n: usize, signal: usize, noise: f64, seed: u64) -> PairDataset {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let instances = (0..n)
        .map(|i| {
            let truth = Label::from_index(i % 2);
            let mut deltas: [f64; N_FEATURES] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            deltas[signal] = match truth {
                Label::Same => rng.gen_range(-1.0..1.0),
                Label::Different => rng.gen_range(2.0..4.0),
            };
            let label = if rng.gen_bool(noise) {
                Label::from_index(1 - truth.index())
            } else {
                truth
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

/// Maximum information gain of one feature over every threshold, computed
/// by brute force: try `x <= v` for every observed value `v`.
pub fn exhaustive_gain(ds: &PairDataset, feature: usize) -> f64 {
    fn h(c: [usize; 2]) -> f64 {
        let n = (c[0] + c[1]) as f64;
        c.iter()
            .filter(|&&k| k > 0)
            .map(|&k| {
                let p = k as f64 / n;
                -p * p.log2()
            })
            .sum()
    }
    let rows: Vec<(f64, usize)> = ds
        .instances
        .iter()
        .map(|r| (r.features()[feature], r.label.index()))
        .collect();
    let mut parent = [0; 2];
    for &(_, y) in &rows {
        parent[y] += 1;
    }
    let n = rows.len() as f64;
    let mut best = 0.0f64;
    for &(v, _) in &rows {
        let mut left = [0; 2];
        for &(x, y) in &rows {
            if x <= v {
                left[y] += 1;
            }
        }
        let right = [parent[0] - left[0], parent[1] - left[1]];
        let nl = (left[0] + left[1]) as f64;
        if nl == 0.0 || nl == n {
            continue;
        }
        let gain = h(parent) - nl / n * h(left) - (n - nl) / n * h(right);
        best = best.max(gain);
    }
    best
}
