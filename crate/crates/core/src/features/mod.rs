//! The sixteen article features and pairwise difference vectors.
//!
//! | index | class      | feature                                            |
//! |-------|------------|----------------------------------------------------|
//! | F1    | coherence  | log-score of (realization, sense) events           |
//! | F2    | coherence  | log-score of (sense, marker) events                |
//! | F3    | coherence  | log-score of (realization, sense, marker) events   |
//! | F4    | coherence  | discourse relations per sentence                   |
//! | F5    | cohesion   | pronouns per sentence                              |
//! | F6    | cohesion   | definite articles per sentence                     |
//! | F7    | surface    | number of words                                    |
//! | F8    | surface    | characters per word                                |
//! | F9    | surface    | words per sentence                                 |
//! | F10   | lexical    | shared word types between consecutive sentences    |
//! | F11   | lexical    | mean synonym count of words                        |
//! | F12   | lexical    | mean relative corpus frequency of words            |
//! | F13   | syntactic  | VP nodes per sentence                              |
//! | F14   | syntactic  | NP nodes per sentence                              |
//! | F15   | syntactic  | SBAR nodes per sentence                            |
//! | F16   | syntactic  | parse-tree height per sentence                     |

mod csv_io;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus_io::{Article, Lexicon, Token};
use crate::discourse_stats::{derive_events, log_score, EventKind, ProbabilityModel};

pub use csv_io::{format_sig, read_features, write_features};

pub const N_FEATURES: usize = 16;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("article `{0}` lacks parse trees needed for syntactic features")]
    MissingTrees(String),
    #[error("article has no sentences")]
    EmptyArticle,
    #[error("expected a {expected} model, got {got}")]
    ModelKind { expected: EventKind, got: EventKind },
    #[error("feature table: {0}")]
    Table(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureClass {
    Coherence,
    Cohesion,
    Surface,
    Lexical,
    Syntactic,
}

impl FeatureClass {
    pub const ALL: [FeatureClass; 5] = [
        FeatureClass::Coherence,
        FeatureClass::Cohesion,
        FeatureClass::Surface,
        FeatureClass::Lexical,
        FeatureClass::Syntactic,
    ];

    /// Zero-based feature indices belonging to this class.
    pub fn indices(self) -> Vec<usize> {
        (0..N_FEATURES)
            .filter(|&i| FEATURE_CLASSES[i] == self)
            .collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureClass::Coherence => "coherence",
            FeatureClass::Cohesion => "cohesion",
            FeatureClass::Surface => "surface",
            FeatureClass::Lexical => "lexical",
            FeatureClass::Syntactic => "syntactic",
        }
    }
}

impl fmt::Display for FeatureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureClass {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        FeatureClass::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or(())
    }
}

pub const FEATURE_CLASSES: [FeatureClass; N_FEATURES] = {
    use FeatureClass::*;
    [
        Coherence, Coherence, Coherence, Coherence, Cohesion, Cohesion, Surface, Surface, Surface,
        Lexical, Lexical, Lexical, Syntactic, Syntactic, Syntactic, Syntactic,
    ]
};

/// Column names used in every CSV.
pub const FEATURE_CODES: [&str; N_FEATURES] = [
    "f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10", "f11", "f12", "f13", "f14", "f15",
    "f16",
];

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "Log_score of <realization-discourse relation>",
    "Log_score of <discourse relation-discourse marker>",
    "Log_score of <realization-discourse relation-discourse marker>",
    "Discourse relation frequency",
    "Average # of pronouns per sentence",
    "Average # of definite articles per sentence",
    "Text length",
    "Average # of characters per word",
    "Average # of words per sentence",
    "Average # of word overlaps per sentence",
    "Average # of synonyms of words",
    "Average frequency of words",
    "Average # of verb phrases per sentence",
    "Average # of noun phrases per sentence",
    "Average # of subordinate clauses per sentence",
    "Average height of syntactic parse tree",
];

/// Parse `F3`/`f3` into the zero-based index 2.
pub fn parse_feature_code(code: &str) -> Option<usize> {
    let digits = code.strip_prefix(['f', 'F'])?;
    let i: usize = digits.parse().ok()?;
    (1..=N_FEATURES).contains(&i).then(|| i - 1)
}

/// Pronouns recognised on untagged text.
pub const FALLBACK_PRONOUNS: &[&str] = &[
    "i",
    "me",
    "my",
    "mine",
    "myself",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
    "he",
    "him",
    "his",
    "himself",
    "she",
    "her",
    "hers",
    "herself",
    "it",
    "its",
    "itself",
    "we",
    "us",
    "our",
    "ours",
    "ourselves",
    "they",
    "them",
    "their",
    "theirs",
    "themselves",
    "who",
    "whom",
    "whose",
    "what",
    "whoever",
    "whatever",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub article_id: String,
    pub values: [f64; N_FEATURES],
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairVector {
    pub id_a: String,
    pub id_b: String,
    pub deltas: [f64; N_FEATURES],
}

/// `F(a) - F(b)` componentwise.
pub fn pair_difference(va: &FeatureVector, vb: &FeatureVector) -> PairVector {
    PairVector {
        id_a: va.article_id.clone(),
        id_b: vb.article_id.clone(),
        deltas: std::array::from_fn(|i| va.values[i] - vb.values[i]),
    }
}

/// Resources the coherence and lexical features read.
#[derive(Debug, Clone)]
pub struct ExtractionContext {
    models: [ProbabilityModel; 3],
    synonyms: Lexicon,
    frequencies: Lexicon,
    pronoun_tags: HashSet<String>,
}

impl ExtractionContext {
    /// `models` must be in [`EventKind::ALL`] order.
    pub fn new(
        models: [ProbabilityModel; 3],
        synonyms: Lexicon,
        frequencies: Lexicon,
    ) -> Result<Self, FeatureError> {
        for (model, expected) in models.iter().zip(EventKind::ALL) {
            if model.kind() != expected {
                return Err(FeatureError::ModelKind {
                    expected,
                    got: model.kind(),
                });
            }
        }
        Ok(ExtractionContext {
            models,
            synonyms,
            frequencies,
            pronoun_tags: ["PRP", "PRP$", "WP", "WP$"]
                .into_iter()
                .map(String::from)
                .collect(),
        })
    }

    pub fn with_pronoun_tags<I: IntoIterator<Item = String>>(mut self, tags: I) -> Self {
        self.pronoun_tags = tags.into_iter().collect();
        self
    }

    pub fn model(&self, kind: EventKind) -> &ProbabilityModel {
        &self.models[kind as usize]
    }

    fn is_pronoun(&self, token: &Token) -> bool {
        match token.pos() {
            Some(tag) => self.pronoun_tags.contains(tag),
            None => FALLBACK_PRONOUNS.contains(&token.surface().to_lowercase().as_str()),
        }
    }
}

fn is_definite_article(token: &Token) -> bool {
    token.surface().eq_ignore_ascii_case("the") && token.pos().is_none_or(|p| p == "DT")
}

fn is_word(surface: &str) -> bool {
    surface.chars().any(char::is_alphanumeric)
}

fn sentence_words(tokens: &[Token]) -> impl Iterator<Item = String> + '_ {
    tokens
        .iter()
        .filter(|t| is_word(t.surface()))
        .map(|t| t.surface().to_lowercase())
}

/// Lowercased tokens that contain at least one letter or digit.
pub fn word_tokens(article: &Article) -> Vec<String> {
    article
        .sentences()
        .iter()
        .flat_map(|s| sentence_words(s.tokens()))
        .collect()
}

fn ratio(num: f64, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

pub fn extract(article: &Article, ctx: &ExtractionContext) -> Result<FeatureVector, FeatureError> {
    let sentences = article.sentences();
    if sentences.is_empty() {
        return Err(FeatureError::EmptyArticle);
    }
    let trees = sentences
        .iter()
        .map(|s| s.tree())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| FeatureError::MissingTrees(article.id().to_string()))?;
    let n_sent = sentences.len();
    let mut v = [0.0; N_FEATURES];

    // coherence
    for kind in EventKind::ALL {
        v[kind as usize] = log_score(ctx.model(kind), &derive_events(article, kind));
    }
    v[3] = ratio(article.relations().len() as f64, n_sent);

    // cohesion
    let tokens = || sentences.iter().flat_map(|s| s.tokens());
    v[4] = ratio(
        tokens().filter(|t| ctx.is_pronoun(t)).count() as f64,
        n_sent,
    );
    v[5] = ratio(
        tokens().filter(|t| is_definite_article(t)).count() as f64,
        n_sent,
    );

    // surface
    let words = word_tokens(article);
    let n_words = words.len();
    v[6] = n_words as f64;
    v[7] = ratio(
        words.iter().map(|w| w.chars().count()).sum::<usize>() as f64,
        n_words,
    );
    v[8] = ratio(n_words as f64, n_sent);

    // lexical
    let types: Vec<HashSet<String>> = sentences
        .iter()
        .map(|s| sentence_words(s.tokens()).collect())
        .collect();
    let overlap: usize = types
        .windows(2)
        .map(|w| w[0].intersection(&w[1]).count())
        .sum();
    v[9] = ratio(overlap as f64, (n_sent - 1).max(1));
    v[10] = ratio(
        words.iter().map(|w| ctx.synonyms.value_or_zero(w)).sum(),
        n_words,
    );
    v[11] = ratio(
        words.iter().map(|w| ctx.frequencies.relative(w)).sum(),
        n_words,
    );

    // syntactic
    for (slot, label) in [(12, "VP"), (13, "NP"), (14, "SBAR")] {
        let count: usize = trees.iter().map(|t| t.count_label(label)).sum();
        v[slot] = ratio(count as f64, n_sent);
    }
    v[15] = ratio(
        trees.iter().map(|t| t.height()).sum::<usize>() as f64,
        n_sent,
    );

    debug_assert!(v.iter().all(|x| x.is_finite()));
    Ok(FeatureVector {
        article_id: article.id().to_string(),
        values: v,
    })
}

/// Extract every article in parallel; output keeps input order.
pub fn extract_all(
    articles: &[Article],
    ctx: &ExtractionContext,
) -> Result<Vec<FeatureVector>, FeatureError> {
    articles.par_iter().map(|a| extract(a, ctx)).collect()
}

/// Index feature vectors by article id.
pub fn by_id(vectors: &[FeatureVector]) -> HashMap<&str, &FeatureVector> {
    vectors.iter().map(|v| (v.article_id.as_str(), v)).collect()
}
