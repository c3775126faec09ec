use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::discourse::{parse_discourse_file, DiscourseRelation};
use super::tree::{parse_bracketed_tree, ParseTree};
use super::CorpusError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    surface: String,
    pos: Option<String>,
}

impl Token {
    pub fn new(surface: impl Into<String>, pos: Option<String>) -> Self {
        Token {
            surface: surface.into(),
            pos,
        }
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn pos(&self) -> Option<&str> {
        self.pos.as_deref()
    }

    fn check(&self) -> Result<(), String> {
        if self.surface.is_empty() {
            return Err("empty token surface".into());
        }
        if let Some(pos) = &self.pos {
            if pos.is_empty() || pos.chars().any(char::is_whitespace) {
                return Err(format!("bad POS tag `{pos}` on `{}`", self.surface));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
    tree: Option<ParseTree>,
}

impl Sentence {
    pub fn from_tokens(tokens: Vec<Token>) -> Result<Self, CorpusError> {
        if tokens.is_empty() {
            return Err(CorpusError::InvariantViolation("empty sentence".into()));
        }
        for t in &tokens {
            t.check().map_err(CorpusError::InvariantViolation)?;
        }
        Ok(Sentence { tokens, tree: None })
    }

    /// Tokens are read from the tree's leaves.
    pub fn from_tree(tree: ParseTree) -> Result<Self, CorpusError> {
        let tokens: Vec<Token> = tree.leaves().into_iter().cloned().collect();
        let mut sentence = Sentence::from_tokens(tokens)?;
        sentence.tree = Some(tree);
        Ok(sentence)
    }

    /// Whitespace tokenization with punctuation split off, see [`tokenize`].
    pub fn from_text(line: &str) -> Result<Self, CorpusError> {
        Sentence::from_tokens(tokenize(line))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn tree(&self) -> Option<&ParseTree> {
        self.tree.as_ref()
    }
}

/// Split on whitespace, then peel leading and trailing ASCII punctuation off
/// each chunk as one-character tokens. A chunk made only of punctuation stays
/// whole, so `...` is one token.
pub fn tokenize(line: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for chunk in line.split_whitespace() {
        if chunk.chars().all(|c| c.is_ascii_punctuation()) {
            out.push(Token::new(chunk, None));
            continue;
        }
        let core_start = chunk.find(|c: char| !c.is_ascii_punctuation()).unwrap_or(0);
        let core_end = chunk
            .rfind(|c: char| !c.is_ascii_punctuation())
            .map(|i| i + chunk[i..].chars().next().map_or(1, char::len_utf8))
            .unwrap_or(chunk.len());
        out.extend(
            chunk[..core_start]
                .chars()
                .map(|c| Token::new(c.to_string(), None)),
        );
        out.push(Token::new(&chunk[core_start..core_end], None));
        out.extend(
            chunk[core_end..]
                .chars()
                .map(|c| Token::new(c.to_string(), None)),
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Simple,
    Complex,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Simple => "simple",
            Level::Complex => "complex",
        })
    }
}

impl FromStr for Level {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.to_ascii_lowercase().as_str() {
            "simple" => Ok(Level::Simple),
            "complex" => Ok(Level::Complex),
            _ => Err(()),
        }
    }
}

/// Complexity metadata: a human rating in [1, 5] or a binary level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArticleMeta {
    None,
    Score(f64),
    Level(Level),
}

impl fmt::Display for ArticleMeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArticleMeta::None => f.write_str("-"),
            ArticleMeta::Score(s) => write!(f, "{s}"),
            ArticleMeta::Level(l) => write!(f, "{l}"),
        }
    }
}

impl FromStr for ArticleMeta {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(ArticleMeta::None);
        }
        if let Ok(level) = s.parse::<Level>() {
            return Ok(ArticleMeta::Level(level));
        }
        let score: f64 = s
            .parse()
            .map_err(|_| format!("`{s}` is neither a score nor simple/complex"))?;
        if !(1.0..=5.0).contains(&score) {
            return Err(format!("score {score} outside [1.0, 5.0]"));
        }
        Ok(ArticleMeta::Score(score))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Article {
    id: String,
    sentences: Vec<Sentence>,
    relations: Vec<DiscourseRelation>,
    meta: ArticleMeta,
}

impl Article {
    pub fn new(
        id: impl Into<String>,
        sentences: Vec<Sentence>,
        relations: Vec<DiscourseRelation>,
        meta: ArticleMeta,
    ) -> Result<Self, CorpusError> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(CorpusError::InvariantViolation(format!(
                "article id `{id}` must be non-empty without whitespace"
            )));
        }
        if sentences.is_empty() {
            return Err(CorpusError::InvariantViolation(format!(
                "article `{id}` has no sentences"
            )));
        }
        if let ArticleMeta::Score(s) = meta {
            if !(1.0..=5.0).contains(&s) {
                return Err(CorpusError::InvariantViolation(format!(
                    "article `{id}` score {s} outside [1.0, 5.0]"
                )));
            }
        }
        Ok(Article {
            id,
            sentences,
            relations,
            meta,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn relations(&self) -> &[DiscourseRelation] {
        &self.relations
    }

    pub fn meta(&self) -> ArticleMeta {
        self.meta
    }

    pub fn score(&self) -> Option<f64> {
        match self.meta {
            ArticleMeta::Score(s) => Some(s),
            _ => None,
        }
    }

    pub fn level(&self) -> Option<Level> {
        match self.meta {
            ArticleMeta::Level(l) => Some(l),
            _ => None,
        }
    }

    pub fn has_trees(&self) -> bool {
        self.sentences.iter().all(|s| s.tree.is_some())
    }

    /// Copy with the sentence list replaced; relations and metadata are kept.
    pub fn with_sentences(&self, sentences: Vec<Sentence>) -> Result<Self, CorpusError> {
        Article::new(
            self.id.clone(),
            sentences,
            self.relations.clone(),
            self.meta,
        )
    }

    pub fn with_relations(&self, relations: Vec<DiscourseRelation>) -> Self {
        Article {
            relations,
            ..self.clone()
        }
    }
}

/// One manifest line. Paths are already resolved against the manifest's
/// directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub line: usize,
    pub id: String,
    pub text_path: PathBuf,
    pub trees_path: Option<PathBuf>,
    pub disc_path: Option<PathBuf>,
    pub meta: ArticleMeta,
}

/// Parse manifest text. Blank lines and `#` comments are skipped; relative
/// paths are joined onto `base_dir`.
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<Vec<ManifestRow>, CorpusError> {
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
        let [id, text_path, trees, disc, meta] = fields[..] else {
            return Err(CorpusError::Manifest {
                line,
                detail: format!("expected 5 tab-separated fields, found {}", fields.len()),
            });
        };
        let meta: ArticleMeta = meta
            .parse()
            .map_err(|detail| CorpusError::Manifest { line, detail })?;
        if id.is_empty() || text_path.is_empty() || text_path == "-" {
            return Err(CorpusError::Manifest {
                line,
                detail: "id and text path are required".into(),
            });
        }
        if !seen.insert(id.to_string()) {
            return Err(CorpusError::Manifest {
                line,
                detail: format!("duplicate article id `{id}`"),
            });
        }
        let resolve = |p: &str| -> Option<PathBuf> { (p != "-").then(|| base_dir.join(p)) };
        rows.push(ManifestRow {
            line,
            id: id.to_string(),
            text_path: base_dir.join(text_path),
            trees_path: resolve(trees),
            disc_path: resolve(disc),
            meta,
        });
    }
    Ok(rows)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRow>, CorpusError> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, base).map_err(|e| e.in_file(path))
}

fn read_file(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CorpusError::FileMissing(path.to_path_buf()),
        _ => CorpusError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn load_article(row: &ManifestRow) -> Result<Article, CorpusError> {
    let text = read_file(&row.text_path)?;
    let text_lines: Vec<(usize, &str)> = content_lines(&text).collect();

    let sentences = match &row.trees_path {
        Some(trees_path) => {
            let trees = read_file(trees_path)?;
            let tree_lines: Vec<(usize, &str)> = content_lines(&trees).collect();
            if tree_lines.len() != text_lines.len() {
                return Err(CorpusError::SentenceTreeCountMismatch {
                    expected: text_lines.len(),
                    got: tree_lines.len(),
                });
            }
            tree_lines
                .into_iter()
                .map(|(line, src)| {
                    let tree = parse_bracketed_tree(src).map_err(|source| CorpusError::Tree {
                        path: trees_path.clone(),
                        line,
                        source,
                    })?;
                    Sentence::from_tree(tree).map_err(|e| e.in_file(trees_path))
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        None => text_lines
            .into_iter()
            .map(|(_, src)| Sentence::from_text(src).map_err(|e| e.in_file(&row.text_path)))
            .collect::<Result<Vec<_>, _>>()?,
    };

    let relations = match &row.disc_path {
        Some(p) => {
            parse_discourse_file(&read_file(p)?).map_err(|source| CorpusError::Discourse {
                path: p.clone(),
                source,
            })?
        }
        None => Vec::new(),
    };

    Article::new(row.id.clone(), sentences, relations, row.meta)
}

/// Load every article listed in a manifest, in manifest order.
pub fn load_corpus(manifest: impl AsRef<Path>) -> Result<Vec<Article>, CorpusError> {
    read_manifest(manifest)?
        .iter()
        .map(|row| {
            load_article(row)
                .map_err(|e| e.in_file(row.trees_path.as_deref().unwrap_or(&row.text_path)))
        })
        .collect()
}
