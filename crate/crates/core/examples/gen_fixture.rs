//! Regenerate the synthetic mini-corpus under `fixtures/mini`.
//!
//!     cargo run -p discomplex --example gen_fixture -- crates/core/fixtures/mini
//!
//! Two corpora share one vocabulary:
//! - `rated.tsv`: 28 articles with scores in [1, 5] (`fx_001` is 3.2);
//! - `aligned.tsv` + `alignment.tsv`: 40 complex articles, each aligned to a
//!   simple counterpart.
//!
//! Only the discourse annotations depend on complexity: complex (or
//! higher-scored) articles carry more relations per sentence and draw
//! concessive/contrastive markers, simple ones draw additive/causal markers.
//! Sentence text, trees and lexicons are level-independent noise.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_150_601;
const N_RATED: usize = 28;
const N_ALIGNED: usize = 40;

const NOUNS: &[&str] = &[
    "river", "city", "council", "farmer", "museum", "engine", "valley", "school", "market",
    "bridge", "painter", "island", "harbour", "forest", "railway", "library", "village", "king",
    "soldier", "teacher", "garden", "church", "factory", "mountain",
];
const ADJS: &[&str] = &[
    "old", "large", "northern", "famous", "small", "quiet", "ancient", "busy", "narrow", "wealthy",
];
const VERBS: &[&str] = &[
    "built",
    "crossed",
    "visited",
    "described",
    "owned",
    "replaced",
    "opened",
    "joined",
    "supported",
    "moved",
    "painted",
    "protected",
];
const SAY_VERBS: &[&str] = &["said", "believed", "reported", "noted"];
const PRONOUNS: &[&str] = &["he", "she", "they", "it"];
const DETS: &[&str] = &["the", "a", "this"];

const COMPLEX_RELS: &[(&str, &str)] = &[
    ("Concession", "although"),
    ("Concession", "nevertheless"),
    ("Contrast", "whereas"),
    ("Contrast", "however"),
    ("Condition", "unless"),
    ("Restatement", "in other words"),
    ("Instantiation", "for instance"),
];
const SIMPLE_RELS: &[(&str, &str)] = &[
    ("Conjunction", "and"),
    ("Conjunction", "also"),
    ("Cause", "because"),
    ("Cause", "so"),
    ("Asynchronous", "then"),
    ("Asynchronous", "after"),
];

struct Tok {
    word: String,
    tag: &'static str,
}

fn leaf(word: &str, tag: &'static str) -> Tok {
    Tok {
        word: word.to_string(),
        tag,
    }
}

fn bracket(label: &str, parts: &[String]) -> String {
    format!("({label} {})", parts.join(" "))
}

fn leaf_str(t: &Tok) -> String {
    format!("({} {})", t.tag, t.word)
}

/// Random noun phrase: returns (bracketed tree, tokens).
fn noun_phrase(rng: &mut ChaCha8Rng) -> (String, Vec<Tok>) {
    let toks = match rng.gen_range(0..4) {
        0 => vec![leaf(PRONOUNS.choose(rng).unwrap(), "PRP")],
        1 => vec![
            leaf(DETS.choose(rng).unwrap(), "DT"),
            leaf(ADJS.choose(rng).unwrap(), "JJ"),
            leaf(NOUNS.choose(rng).unwrap(), "NN"),
        ],
        _ => vec![
            leaf(DETS.choose(rng).unwrap(), "DT"),
            leaf(NOUNS.choose(rng).unwrap(), "NN"),
        ],
    };
    let tree = bracket("NP", &toks.iter().map(leaf_str).collect::<Vec<_>>());
    (tree, toks)
}

fn clause(rng: &mut ChaCha8Rng, depth: usize) -> (String, Vec<Tok>) {
    let (subj, mut toks) = noun_phrase(rng);
    let (vp, vp_toks) = if depth == 0 && rng.gen_bool(0.3) {
        let verb = leaf(SAY_VERBS.choose(rng).unwrap(), "VBD");
        let that = leaf("that", "IN");
        let (inner, inner_toks) = clause(rng, depth + 1);
        let sbar = bracket("SBAR", &[leaf_str(&that), inner]);
        let tree = bracket("VP", &[leaf_str(&verb), sbar]);
        let mut t = vec![verb, that];
        t.extend(inner_toks);
        (tree, t)
    } else {
        let verb = leaf(VERBS.choose(rng).unwrap(), "VBD");
        let (obj, obj_toks) = noun_phrase(rng);
        let tree = bracket("VP", &[leaf_str(&verb), obj]);
        let mut t = vec![verb];
        t.extend(obj_toks);
        (tree, t)
    };
    toks.extend(vp_toks);
    (bracket("S", &[subj, vp]), toks)
}

/// Article text and trees, one sentence per line.
fn sentences(rng: &mut ChaCha8Rng) -> (String, String) {
    let n = rng.gen_range(4..=8);
    let (mut text, mut trees) = (String::new(), String::new());
    for _ in 0..n {
        let (tree, toks) = clause(rng, 0);
        let words: Vec<&str> = toks.iter().map(|t| t.word.as_str()).collect();
        let _ = writeln!(text, "{} .", words.join(" "));
        // close the clause with sentence-final punctuation inside the root
        let tree = format!("{} (. .))", &tree[..tree.len() - 1]);
        let _ = writeln!(trees, "{tree}");
    }
    (text, trees)
}

/// Discourse annotations; `complexity` in [0, 1] drives both the relation
/// rate and the marker pool.
fn relations(rng: &mut ChaCha8Rng, n_sent: usize, complexity: f64) -> String {
    let rate = 0.3 + 1.2 * complexity + rng.gen_range(-0.25..0.25);
    let count = ((n_sent as f64 * rate).round() as usize).max(1);
    let mut out = String::new();
    for _ in 0..count {
        let pool = if rng.gen_bool(0.15 + 0.7 * complexity) {
            COMPLEX_RELS
        } else {
            SIMPLE_RELS
        };
        let (sense, marker) = pool.choose(rng).unwrap();
        if rng.gen_bool(0.3) {
            let _ = writeln!(out, "Implicit|{sense}|-");
        } else {
            let _ = writeln!(out, "Explicit|{sense}|{marker}");
        }
    }
    out
}

struct Writer {
    root: PathBuf,
}

impl Writer {
    fn put(&self, rel: &str, contents: &str) {
        let path = self.root.join(rel);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, contents).unwrap();
    }

    /// Write one article's files and return its manifest line.
    fn article(&self, rng: &mut ChaCha8Rng, id: &str, complexity: f64, meta: &str) -> String {
        let (text, trees) = sentences(rng);
        let n_sent = text.lines().count();
        self.put(&format!("text/{id}.txt"), &text);
        self.put(&format!("trees/{id}.mrg"), &trees);
        self.put(
            &format!("disc/{id}.pipe"),
            &relations(rng, n_sent, complexity),
        );
        format!("{id}\ttext/{id}.txt\ttrees/{id}.mrg\tdisc/{id}.pipe\t{meta}\n")
    }
}

fn main() {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini"));
    let w = Writer { root };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut rated = String::from("# id\ttext\ttrees\tdiscourse\tscore\n");
    for i in 1..=N_RATED {
        let score: f64 = if i == 1 {
            3.2
        } else {
            (rng.gen_range(10..=50) as f64) / 10.0
        };
        let id = format!("fx_{i:03}");
        rated += &w.article(&mut rng, &id, (score - 1.0) / 4.0, &format!("{score:.1}"));
    }
    w.put("rated.tsv", &rated);

    let mut aligned = String::from("# id\ttext\ttrees\tdiscourse\tlevel\n");
    let mut alignment = String::from("# complex\tsimple\n");
    for i in 1..=N_ALIGNED {
        let (cx, sm) = (format!("cx_{i:03}"), format!("sm_{i:03}"));
        aligned += &w.article(&mut rng, &cx, 1.0, "complex");
        aligned += &w.article(&mut rng, &sm, 0.0, "simple");
        let _ = writeln!(alignment, "{cx}\t{sm}");
    }
    w.put("aligned.tsv", &aligned);
    w.put("alignment.tsv", &alignment);

    let mut vocab: Vec<&str> = [NOUNS, ADJS, VERBS, SAY_VERBS, PRONOUNS, DETS, &["that"]].concat();
    vocab.sort_unstable();
    let (mut syn, mut freq) = (String::new(), String::new());
    for word in vocab {
        let _ = writeln!(syn, "{word}\t{}", rng.gen_range(1..=12));
        let _ = writeln!(freq, "{word}\t{}", rng.gen_range(1_000..=2_000_000));
    }
    w.put("synonyms.tsv", &syn);
    w.put("frequencies.tsv", &freq);
}
