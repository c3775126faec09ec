//! Discourse-relation annotations in the pipe format
//! `Realization|Sense|marker`, one relation per line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscourseError {
    #[error("line {line}: unknown sense `{token}`")]
    UnknownSense { line: usize, token: String },
    #[error("line {line}: unknown realization `{token}`")]
    UnknownRealization { line: usize, token: String },
    #[error("line {0}: explicit relation without a marker")]
    ExplicitWithoutMarker(usize),
    #[error("line {0}: expected `Realization|Sense|marker`")]
    MalformedLine(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Realization {
    Explicit,
    Implicit,
}

impl Realization {
    pub fn as_str(self) -> &'static str {
        match self {
            Realization::Explicit => "explicit",
            Realization::Implicit => "implicit",
        }
    }
}

impl FromStr for Realization {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "explicit" => Ok(Realization::Explicit),
            "implicit" => Ok(Realization::Implicit),
            _ => Err(()),
        }
    }
}

/// The sixteen second-level PDTB senses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sense {
    Asynchronous,
    Synchronous,
    Cause,
    PragmaticCause,
    Condition,
    PragmaticCondition,
    Contrast,
    PragmaticContrast,
    Concession,
    PragmaticConcession,
    Conjunction,
    Instantiation,
    Restatement,
    Alternative,
    Exception,
    List,
}

impl Sense {
    pub const ALL: [Sense; 16] = [
        Sense::Asynchronous,
        Sense::Synchronous,
        Sense::Cause,
        Sense::PragmaticCause,
        Sense::Condition,
        Sense::PragmaticCondition,
        Sense::Contrast,
        Sense::PragmaticContrast,
        Sense::Concession,
        Sense::PragmaticConcession,
        Sense::Conjunction,
        Sense::Instantiation,
        Sense::Restatement,
        Sense::Alternative,
        Sense::Exception,
        Sense::List,
    ];

    /// Canonical lowercase name used in event keys, e.g. `pragmatic_cause`.
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Asynchronous => "asynchronous",
            Sense::Synchronous => "synchronous",
            Sense::Cause => "cause",
            Sense::PragmaticCause => "pragmatic_cause",
            Sense::Condition => "condition",
            Sense::PragmaticCondition => "pragmatic_condition",
            Sense::Contrast => "contrast",
            Sense::PragmaticContrast => "pragmatic_contrast",
            Sense::Concession => "concession",
            Sense::PragmaticConcession => "pragmatic_concession",
            Sense::Conjunction => "conjunction",
            Sense::Instantiation => "instantiation",
            Sense::Restatement => "restatement",
            Sense::Alternative => "alternative",
            Sense::Exception => "exception",
            Sense::List => "list",
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Accepts `Pragmatic Cause`, `pragmatic_cause`, `Pragmatic-Cause` and
/// `PragmaticCause` alike.
impl FromStr for Sense {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let squashed: String = s
            .chars()
            .filter(|c| !matches!(c, ' ' | '_' | '-'))
            .flat_map(char::to_lowercase)
            .collect();
        Sense::ALL
            .into_iter()
            .find(|sense| sense.as_str().replace('_', "") == squashed)
            .ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscourseRelation {
    realization: Realization,
    sense: Sense,
    marker: Option<String>,
}

impl DiscourseRelation {
    /// Fails when an explicit relation has no marker. Markers are trimmed and
    /// lowercased; an empty marker counts as absent.
    pub fn new(
        realization: Realization,
        sense: Sense,
        marker: Option<&str>,
    ) -> Result<Self, &'static str> {
        let marker = marker
            .map(|m| m.trim().to_lowercase())
            .filter(|m| !m.is_empty());
        if realization == Realization::Explicit && marker.is_none() {
            return Err("explicit relation requires a marker");
        }
        Ok(DiscourseRelation {
            realization,
            sense,
            marker,
        })
    }

    pub fn realization(&self) -> Realization {
        self.realization
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn marker(&self) -> Option<&str> {
        self.marker.as_deref()
    }
}

impl fmt::Display for DiscourseRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let realization = match self.realization {
            Realization::Explicit => "Explicit",
            Realization::Implicit => "Implicit",
        };
        write!(
            f,
            "{realization}|{:?}|{}",
            self.sense,
            self.marker.as_deref().unwrap_or("-")
        )
    }
}

/// Parse a whole discourse file. Line numbers in errors are 1-based.
pub fn parse_discourse_file(text: &str) -> Result<Vec<DiscourseRelation>, DiscourseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('|').map(str::trim).collect();
        let [realization, sense, marker] = fields[..] else {
            return Err(DiscourseError::MalformedLine(line));
        };
        let realization: Realization =
            realization
                .parse()
                .map_err(|_| DiscourseError::UnknownRealization {
                    line,
                    token: realization.to_string(),
                })?;
        let sense: Sense = sense.parse().map_err(|_| DiscourseError::UnknownSense {
            line,
            token: sense.to_string(),
        })?;
        let marker = (marker != "-").then_some(marker);
        let rel = DiscourseRelation::new(realization, sense, marker)
            .map_err(|_| DiscourseError::ExplicitWithoutMarker(line))?;
        out.push(rel);
    }
    Ok(out)
}
