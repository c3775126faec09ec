//! Readers for articles, constituency trees, discourse annotations,
//! lexicons and corpus manifests.

mod article;
mod discourse;
mod lexicon;
mod tree;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use article::{
    load_article, load_corpus, parse_manifest, read_manifest, tokenize, Article, ArticleMeta,
    Level, ManifestRow, Sentence, Token,
};
pub use discourse::{parse_discourse_file, DiscourseError, DiscourseRelation, Realization, Sense};
pub use lexicon::{load_lexicon, Lexicon, LexiconError};
pub use tree::{parse_bracketed_tree, ParseTree, TreeError};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("file not found: {}", .0.display())]
    FileMissing(PathBuf),
    #[error("sentence/tree count mismatch: {expected} text lines, {got} trees")]
    SentenceTreeCountMismatch { expected: usize, got: usize },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("{}:{line}: {source}", path.display())]
    Tree {
        path: PathBuf,
        line: usize,
        source: TreeError,
    },
    #[error("{}: {source}", path.display())]
    Discourse {
        path: PathBuf,
        source: DiscourseError,
    },
    #[error("manifest line {line}: {detail}")]
    Manifest { line: usize, detail: String },
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        source: Box<CorpusError>,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CorpusError {
    /// Attach a file name unless the error already carries one.
    pub(crate) fn in_file(self, path: &Path) -> CorpusError {
        match self {
            e @ (CorpusError::FileMissing(_)
            | CorpusError::Tree { .. }
            | CorpusError::Discourse { .. }
            | CorpusError::InFile { .. }
            | CorpusError::Io { .. }) => e,
            e => CorpusError::InFile {
                path: path.to_path_buf(),
                source: Box::new(e),
            },
        }
    }
}
