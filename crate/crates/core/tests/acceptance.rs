//! Acceptance battery. Prints one PASS/FAIL line per criterion; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use discomplex::cli::{
    model_file_name, FEATURES_FILE, FOREST_FILE, PAIRS_FILE, RANKING_FILE, REPORT_FILE,
};
use discomplex::datasets::{
    build_aligned_pairs, build_threshold_pairs, read_dataset, write_dataset, Label, PairDataset,
    PairInstance,
};
use discomplex::discourse_stats::{
    derive_events, log_score, multinomial_pmf, Event, EventBag, EventDistribution, EventKind,
    ProbabilityModel,
};
use discomplex::features::{extract_all, pair_difference, FeatureVector, PairVector, N_FEATURES};
use discomplex::learn::{
    cross_validate, rank_information_gain, train_forest, welch_t_test, ForestParams, RandomForest,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn random_bag(rng: &mut ChaCha8Rng, kind: EventKind, max_n: u64) -> EventBag {
    const SENSES: [&str; 5] = ["contrast", "cause", "conjunction", "concession", "list"];
    const MARKERS: [&str; 4] = ["but", "because", "and", "although"];
    let n = rng.gen_range(0..=max_n);
    let mut bag = EventBag::new();
    for _ in 0..n {
        let sense = SENSES[rng.gen_range(0..SENSES.len())];
        let marker = MARKERS[rng.gen_range(0..MARKERS.len())];
        let real = if rng.gen_bool(0.5) {
            "explicit"
        } else {
            "implicit"
        };
        let parts: Vec<&str> = match kind {
            EventKind::RealizationSense => vec![real, sense],
            EventKind::SenseMarker => vec![sense, marker],
            EventKind::RealizationSenseMarker => vec![real, sense, marker],
        };
        *bag.entry(Event::new(kind, parts).unwrap()).or_insert(0) += 1;
    }
    bag
}

fn c1_log_score_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let cases = 1200;
    for case in 0..cases {
        let kind = EventKind::ALL[case % 3];
        let train: Vec<EventBag> = (0..rng.gen_range(1..8))
            .map(|_| random_bag(&mut rng, kind, 12))
            .collect();
        let alpha = rng.gen_range(0.05..3.0);
        let model = ProbabilityModel::fit_bags(kind, &train, alpha).map_err(|e| e.to_string())?;
        let bag = random_bag(&mut rng, kind, 20);
        let pmf = multinomial_pmf(&model, &bag).map_err(|e| e.to_string())?;
        let rel = ((log_score(&model, &bag).exp() - pmf) / pmf).abs();
        worst = worst.max(rel);
    }
    let elapsed = start.elapsed();
    check!(worst < 1e-9, "worst relative error {worst:e}");
    check!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "{cases} cases, worst rel. error {worst:.1e}, {elapsed:.2?}"
    ))
}

struct Toy;

impl EventDistribution for Toy {
    fn event_prob(&self, e: &Event) -> f64 {
        if e.parts()[1] == "a" {
            0.6
        } else {
            0.4
        }
    }
    fn n_prob(&self, n: u64) -> f64 {
        if n == 3 {
            0.5
        } else {
            0.1
        }
    }
}

fn c2_worked_example() -> Outcome {
    let ev = |s: &str| Event::new(EventKind::RealizationSense, ["explicit", s]).unwrap();
    let bag: EventBag = [(ev("a"), 2), (ev("b"), 1)].into_iter().collect();
    let ls = log_score(&Toy, &bag);
    let err = (ls - 0.216f64.ln()).abs();
    check!(err <= 1e-12, "log_score {ls} off by {err:e}");
    let pmf = multinomial_pmf(&Toy, &bag).map_err(|e| e.to_string())?;
    check!((pmf - 0.216).abs() < 1e-15, "pmf {pmf}");
    Ok(format!("log_score = {ls:.12} (ln 0.216 ± {err:.0e})"))
}

fn c3_feature_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let random = |rng: &mut ChaCha8Rng, id: &str| FeatureVector {
        article_id: id.into(),
        values: std::array::from_fn(|_| rng.gen_range(-1e3..1e3)),
    };
    for _ in 0..1000 {
        let (a, b) = (random(&mut rng, "a"), random(&mut rng, "b"));
        check!(
            pair_difference(&a, &a).deltas == [0.0; N_FEATURES],
            "v - v != 0"
        );
        let (ab, ba) = (pair_difference(&a, &b), pair_difference(&b, &a));
        check!(
            ab.deltas.iter().zip(&ba.deltas).all(|(x, y)| *x == -*y),
            "antisymmetry"
        );
    }

    // sentence order only matters for word overlap (F10)
    let ctx = common::fixture_context();
    let articles = common::rated_articles();
    let base = extract_all(&articles, &ctx).map_err(|e| e.to_string())?;
    let reordered: Vec<_> = articles
        .iter()
        .map(|a| {
            let mut s = a.sentences().to_vec();
            s.reverse();
            s.rotate_left(1);
            a.with_sentences(s).unwrap()
        })
        .collect();
    let shuffled = extract_all(&reordered, &ctx).map_err(|e| e.to_string())?;
    for (x, y) in base.iter().zip(&shuffled) {
        for f in (3..N_FEATURES).filter(|&f| f != 9) {
            let (p, q) = (x.values[f], y.values[f]);
            check!(
                p == q || (p - q).abs() <= 1e-12 * p.abs().max(q.abs()),
                "{} f{} changed: {p} vs {q}",
                x.article_id,
                f + 1
            );
        }
    }
    Ok(format!(
        "1000 random vectors exact; {} fixture articles reorder-invariant",
        articles.len()
    ))
}

fn c4_pairing_counts() -> Outcome {
    let ctx = common::fixture_context();
    let rated = common::rated_articles();
    let fx_001 = rated
        .iter()
        .find(|a| a.id() == "fx_001")
        .ok_or("fx_001 missing")?;
    check!(
        fx_001.score() == Some(3.2),
        "fx_001 score {:?}",
        fx_001.score()
    );
    let vectors = extract_all(&rated, &ctx).map_err(|e| e.to_string())?;
    let scored: Vec<(&FeatureVector, f64)> = vectors
        .iter()
        .zip(&rated)
        .map(|(v, a)| (v, a.score().unwrap()))
        .collect();
    let ds = build_threshold_pairs(&scored, 0.7).map_err(|e| e.to_string())?;
    check!(ds.len() == 378, "{} threshold pairs", ds.len());

    let edge = [(&vectors[0], 3.2), (&vectors[1], 2.5)];
    let ds_edge = build_threshold_pairs(&edge, 0.7).map_err(|e| e.to_string())?;
    check!(
        ds_edge.instances[0].label == Label::Same,
        "|Δ| = 0.7 is not Same"
    );

    let aligned = common::aligned_articles();
    let av = extract_all(&aligned, &ctx).map_err(|e| e.to_string())?;
    let pairs: Vec<(&FeatureVector, &FeatureVector)> =
        av.chunks(2).map(|c| (&c[0], &c[1])).collect();
    let small = build_aligned_pairs(&pairs, 5, 7).map_err(|e| e.to_string())?;
    check!(
        small.len() == 10 && small.label_counts() == [5, 5],
        "{:?}",
        small.label_counts()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let big: Vec<(FeatureVector, FeatureVector)> = (0..994)
        .map(|i| {
            let mk = |id: String, rng: &mut ChaCha8Rng| FeatureVector {
                article_id: id,
                values: std::array::from_fn(|_| rng.gen()),
            };
            (mk(format!("c{i}"), &mut rng), mk(format!("s{i}"), &mut rng))
        })
        .collect();
    let big_refs: Vec<_> = big.iter().map(|(c, s)| (c, s)).collect();
    let full = build_aligned_pairs(&big_refs, 994, 7).map_err(|e| e.to_string())?;
    check!(full.len() == 1988, "{} aligned pairs", full.len());
    Ok(format!(
        "28 articles -> {} pairs ({} same / {} different); |Δ|=0.7 -> same; aligned 5 -> {}, 994 -> {}",
        ds.len(),
        ds.label_counts()[0],
        ds.label_counts()[1],
        small.len(),
        full.len()
    ))
}

fn c5_learner_sanity() -> Outcome {
    let start = Instant::now();
    let ds = common::planted_dataset(400, 6, 0.05, 5);
    let params = ForestParams::default().with_seed(5);
    let cv = cross_validate(&ds, &params, &(0..N_FEATURES).collect::<Vec<_>>(), 10)
        .map_err(|e| e.to_string())?;
    let base = cross_validate(&ds, &params, &[], 10).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check!(cv.mean >= 0.90, "forest accuracy {}", cv.mean);
    check!(
        (base.mean - 0.5).abs() <= 0.02,
        "baseline accuracy {}",
        base.mean
    );
    check!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!(
        "forest {:.2}%, baseline {:.2}%, {elapsed:.2?}",
        100.0 * cv.mean,
        100.0 * base.mean
    ))
}

#[derive(Deserialize)]
struct WelchBattery {
    cases: Vec<WelchCase>,
}

#[derive(Deserialize)]
struct WelchCase {
    name: String,
    a: Vec<f64>,
    b: Vec<f64>,
    t: f64,
    df: f64,
    p: f64,
}

fn c6_welch_oracle() -> Outcome {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/welch_reference.json"
    );
    let battery: WelchBattery =
        serde_json::from_str(&fs::read_to_string(path).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let cases = battery.cases;
    check!(cases.len() == 20, "{} cases", cases.len());
    let mut worst = 0.0f64;
    let mut saw_identical = false;
    for c in &cases {
        let r = welch_t_test(&c.a, &c.b).map_err(|e| format!("{}: {e}", c.name))?;
        let err = (r.p_value - c.p).abs();
        worst = worst.max(err);
        check!(err < 1e-6, "{}: p {} vs {}", c.name, r.p_value, c.p);
        if c.t.is_finite() {
            check!(
                (r.t_stat - c.t).abs() < 1e-6,
                "{}: t {} vs {}",
                c.name,
                r.t_stat,
                c.t
            );
        }
        if c.df.is_finite() {
            check!(
                (r.df - c.df).abs() < 1e-6,
                "{}: df {} vs {}",
                c.name,
                r.df,
                c.df
            );
        }
        saw_identical |= c.p == 1.0 && r.p_value == 1.0;
    }
    check!(saw_identical, "no identical-samples case with p = 1");
    Ok(format!("20 cases, worst |Δp| {worst:.1e}"))
}

fn random_small_dataset(rng: &mut ChaCha8Rng) -> PairDataset {
    let n = rng.gen_range(2..=50);
    let levels = rng.gen_range(2..8);
    PairDataset {
        instances: (0..n)
            .map(|i| PairInstance {
                vector: PairVector {
                    id_a: format!("a{i}"),
                    id_b: format!("b{i}"),
                    deltas: std::array::from_fn(|_| f64::from(rng.gen_range(0..levels)) * 0.5),
                },
                label: Label::from_index(rng.gen_range(0..2)),
            })
            .collect(),
        provenance: None,
    }
}

fn c7_information_gain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let battery = 200;
    for d in 0..battery {
        let ds = random_small_dataset(&mut rng);
        let ranked = rank_information_gain(&ds).map_err(|e| e.to_string())?;
        let mut oracle: Vec<(usize, f64)> = (0..N_FEATURES)
            .map(|f| (f, common::exhaustive_gain(&ds, f)))
            .collect();
        for &(f, g) in &ranked {
            check!(
                (g - oracle[f].1).abs() < 1e-12,
                "dataset {d} f{}: {g} vs {}",
                f + 1,
                oracle[f].1
            );
        }
        // identical order once oracle gains are snapped to the computed ones
        oracle.sort_by(|a, b| {
            let (ga, gb) = (ranked_gain(&ranked, a.0), ranked_gain(&ranked, b.0));
            gb.total_cmp(&ga).then(a.0.cmp(&b.0))
        });
        check!(
            oracle.iter().map(|o| o.0).eq(ranked.iter().map(|r| r.0)),
            "dataset {d}: order differs"
        );
    }
    let planted = common::planted_dataset(200, 1, 0.05, 77);
    let ranked = rank_information_gain(&planted).map_err(|e| e.to_string())?;
    check!(ranked[0].0 == 1, "top feature f{}", ranked[0].0 + 1);
    Ok(format!(
        "{battery} datasets match brute force; planted F2 ranks first (IG {:.3})",
        ranked[0].1
    ))
}

fn ranked_gain(ranked: &[(usize, f64)], f: usize) -> f64 {
    ranked.iter().find(|r| r.0 == f).unwrap().1
}

fn c8_end_to_end() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let start = Instant::now();
    let runs = common::run_pipeline(a.path(), "2015");
    let elapsed = start.elapsed();
    for o in &runs {
        check!(o.code == 0, "step failed ({}): {}", o.code, o.stderr);
    }
    check!(runs.len() == 5, "pipeline stopped early");
    check!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    let again = common::run_pipeline(b.path(), "2015");
    check!(again.iter().all(|o| o.code == 0), "second run failed");

    let mut files: Vec<String> = EventKind::ALL.iter().map(|&k| model_file_name(k)).collect();
    files.extend(
        [
            FEATURES_FILE,
            PAIRS_FILE,
            REPORT_FILE,
            FOREST_FILE,
            RANKING_FILE,
        ]
        .map(String::from),
    );
    for f in &files {
        let x = fs::read(a.path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        let y = fs::read(b.path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        check!(x == y, "{f} differs between runs");
    }

    let report = fs::read_to_string(a.path().join(REPORT_FILE)).unwrap();
    let rows: BTreeMap<&str, Vec<&str>> = report
        .lines()
        .skip(1)
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[0], cols)
        })
        .collect();
    check!(rows.len() == 12, "{} report rows", rows.len());
    let verdict = |c: &str| rows.get(c).map(|r| r[4]).unwrap_or("missing");
    check!(
        verdict("all-minus-coherence") == "⇓",
        "all-minus-coherence: {}",
        verdict("all-minus-coherence")
    );
    for noise in ["cohesion", "surface", "lexical", "syntactic"] {
        let c = format!("all-minus-{noise}");
        check!(verdict(&c) == "=", "{c}: {}", verdict(&c));
    }
    Ok(format!(
        "5 steps in {elapsed:.2?}, byte-identical rerun; all {}%, all-minus-coherence {}% ⇓, noise classes =",
        rows["all"][2], rows["all-minus-coherence"][2]
    ))
}

fn c9_round_trips() -> Outcome {
    let articles = common::aligned_articles();
    for kind in EventKind::ALL {
        let model = ProbabilityModel::fit(&articles, kind, 0.7).map_err(|e| e.to_string())?;
        let back =
            ProbabilityModel::from_json_str(&model.to_json_string()).map_err(|e| e.to_string())?;
        for a in &articles {
            let bag = derive_events(a, kind);
            check!(
                log_score(&model, &bag).to_bits() == log_score(&back, &bag).to_bits(),
                "{kind} score changed for {}",
                a.id()
            );
        }
    }

    let ds = common::planted_dataset(120, 3, 0.1, 9);
    let mut buf = Vec::new();
    write_dataset(&mut buf, &ds).map_err(|e| e.to_string())?;
    let ds_back = read_dataset(buf.as_slice()).map_err(|e| e.to_string())?;
    check!(ds_back.instances == ds.instances, "dataset changed");

    let params = ForestParams {
        n_trees: 25,
        ..ForestParams::default()
    }
    .with_seed(9);
    let all: Vec<usize> = (0..N_FEATURES).collect();
    let forest = train_forest(&ds, &params, &all).map_err(|e| e.to_string())?;
    let retrained = train_forest(&ds_back, &params, &all).map_err(|e| e.to_string())?;
    let reloaded =
        RandomForest::from_json_str(&forest.to_json_string()).map_err(|e| e.to_string())?;
    for inst in &ds.instances {
        let p = forest.predict_proba(inst.features());
        for other in [&retrained, &reloaded] {
            let q = other.predict_proba(inst.features());
            check!(
                p[0].to_bits() == q[0].to_bits() && p[1].to_bits() == q[1].to_bits(),
                "forest prediction changed"
            );
        }
    }
    Ok("3 models, 120-instance dataset and 25-tree forest reload bit-identically".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        ("log-score oracle", c1_log_score_oracle),
        ("worked example", c2_worked_example),
        ("feature algebra", c3_feature_algebra),
        ("pairing counts", c4_pairing_counts),
        ("learner sanity", c5_learner_sanity),
        ("Welch t-test oracle", c6_welch_oracle),
        ("information-gain oracle", c7_information_gain),
        ("end-to-end pipeline", c8_end_to_end),
        ("serialization round-trips", c9_round_trips),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
