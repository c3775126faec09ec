//! Multinomial models over discourse properties.
//!
//! Each article is a bag of discourse events (for example
//! `(explicit, contrast)` pairs). A [`ProbabilityModel`] fitted on a training
//! population gives smoothed event probabilities and a distribution over the
//! number of events per article; [`log_score`] is the log of the multinomial
//! probability of an article's bag under that model.

mod model;
mod score;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus_io::{Article, DiscourseRelation};

pub use model::ProbabilityModel;
pub use score::{log_factorial, log_score, multinomial_pmf, EventDistribution, MAX_EXACT_EVENTS};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("cannot fit a model on an empty corpus")]
    EmptyCorpus,
    #[error("smoothing constant must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("exact evaluation limited to {max} events, got {n}")]
    OverflowRisk { n: usize, max: usize },
    #[error("malformed model file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Which discourse properties make up an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    RealizationSense,
    SenseMarker,
    RealizationSenseMarker,
}

impl EventKind {
    pub const ALL: [EventKind; 3] = [
        EventKind::RealizationSense,
        EventKind::SenseMarker,
        EventKind::RealizationSenseMarker,
    ];

    pub fn arity(self) -> usize {
        match self {
            EventKind::RealizationSense | EventKind::SenseMarker => 2,
            EventKind::RealizationSenseMarker => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::RealizationSense => "realization_sense",
            EventKind::SenseMarker => "sense_marker",
            EventKind::RealizationSenseMarker => "realization_sense_marker",
        }
    }

    /// The event a relation contributes, if any. Marker-bearing kinds skip
    /// relations without a marker.
    pub fn event_of(self, rel: &DiscourseRelation) -> Option<Event> {
        let realization = rel.realization().as_str();
        let sense = rel.sense().as_str();
        let parts: Vec<String> = match self {
            EventKind::RealizationSense => vec![realization.into(), sense.into()],
            EventKind::SenseMarker => vec![sense.into(), rel.marker()?.into()],
            EventKind::RealizationSenseMarker => {
                vec![realization.into(), sense.into(), rel.marker()?.into()]
            }
        };
        Some(Event { kind: self, parts })
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, StatsError> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| StatsError::Format(format!("unknown event kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    kind: EventKind,
    parts: Vec<String>,
}

impl Event {
    pub fn new<S: Into<String>>(
        kind: EventKind,
        parts: impl IntoIterator<Item = S>,
    ) -> Result<Self, StatsError> {
        let parts: Vec<String> = parts.into_iter().map(|p| p.into().to_lowercase()).collect();
        if parts.len() != kind.arity() || parts.iter().any(String::is_empty) {
            return Err(StatsError::Format(format!(
                "{kind} events need {} non-empty parts, got {:?}",
                kind.arity(),
                parts
            )));
        }
        Ok(Event { kind, parts })
    }

    pub fn kind(&self) -> EventKind {
        self.kind
    }

    pub fn parts(&self) -> &[String] {
        &self.parts
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.parts.join(", "))
    }
}

/// A bag of events with multiplicities.
pub type EventBag = BTreeMap<Event, u64>;

pub fn bag_size(bag: &EventBag) -> u64 {
    bag.values().sum()
}

pub fn derive_events(article: &Article, kind: EventKind) -> EventBag {
    events_from_relations(article.relations(), kind)
}

pub fn events_from_relations(relations: &[DiscourseRelation], kind: EventKind) -> EventBag {
    let mut bag = EventBag::new();
    for event in relations.iter().filter_map(|r| kind.event_of(r)) {
        *bag.entry(event).or_insert(0) += 1;
    }
    bag
}
