use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {0}: negative value")]
    NegativeValue(usize),
    #[error("line {0}: expected `word<TAB>value`")]
    MalformedLine(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Word-keyed non-negative weights: synonym counts, corpus frequencies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: HashMap<String, f64>,
    total: f64,
}

impl Lexicon {
    /// Entries are lowercased and merged by summation.
    pub fn from_entries<I, S>(entries: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::default();
        for (i, (word, value)) in entries.into_iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(LexiconError::NegativeValue(i + 1));
            }
            lex.insert(word.as_ref(), value);
        }
        Ok(lex)
    }

    fn insert(&mut self, word: &str, value: f64) {
        *self.entries.entry(word.to_lowercase()).or_insert(0.0) += value;
        self.total += value;
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let mut fields = raw.split('\t');
            let (Some(word), Some(value), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(LexiconError::MalformedLine(line));
            };
            let word = word.trim();
            if word.is_empty() {
                return Err(LexiconError::MalformedLine(line));
            }
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| LexiconError::MalformedLine(line))?;
            if !value.is_finite() {
                return Err(LexiconError::MalformedLine(line));
            }
            if value < 0.0 {
                return Err(LexiconError::NegativeValue(line));
            }
            lex.insert(word, value);
        }
        Ok(lex)
    }

    pub fn get(&self, word: &str) -> Option<f64> {
        self.entries.get(word).copied()
    }

    /// Value for a lowercase word, 0 when absent.
    pub fn value_or_zero(&self, word: &str) -> f64 {
        self.get(word).unwrap_or(0.0)
    }

    /// Value divided by the lexicon total; 0 for an empty lexicon.
    pub fn relative(&self, word: &str) -> f64 {
        if self.total > 0.0 {
            self.value_or_zero(word) / self.total
        } else {
            0.0
        }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
    let text = std::fs::read_to_string(path)?;
    Lexicon::parse(&text)
}
