use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::{bag_size, derive_events, Event, EventBag, EventDistribution, EventKind, StatsError};
use crate::corpus_io::Article;

/// Smoothed event probabilities and the per-article event-count histogram
/// for one [`EventKind`], tallied over a training population.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityModel {
    kind: EventKind,
    alpha: f64,
    event_counts: BTreeMap<Event, u64>,
    event_total: u64,
    n_counts: BTreeMap<u64, u64>,
    n_total: u64,
}

impl ProbabilityModel {
    pub fn fit(articles: &[Article], kind: EventKind, alpha: f64) -> Result<Self, StatsError> {
        let bags: Vec<EventBag> = articles.iter().map(|a| derive_events(a, kind)).collect();
        Self::fit_bags(kind, &bags, alpha)
    }

    /// Fit from pre-derived bags, one per training article.
    pub fn fit_bags(kind: EventKind, bags: &[EventBag], alpha: f64) -> Result<Self, StatsError> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(StatsError::NonPositiveAlpha(alpha));
        }
        if bags.is_empty() {
            return Err(StatsError::EmptyCorpus);
        }
        let mut model = ProbabilityModel {
            kind,
            alpha,
            event_counts: BTreeMap::new(),
            event_total: 0,
            n_counts: BTreeMap::new(),
            n_total: 0,
        };
        for bag in bags {
            for (event, &count) in bag {
                if event.kind() != kind {
                    return Err(StatsError::Format(format!(
                        "{} event in a {kind} model",
                        event.kind()
                    )));
                }
                *model.event_counts.entry(event.clone()).or_insert(0) += count;
                model.event_total += count;
            }
            *model.n_counts.entry(bag_size(bag)).or_insert(0) += 1;
            model.n_total += 1;
        }
        Ok(model)
    }

    pub fn kind(&self) -> EventKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn event_counts(&self) -> &BTreeMap<Event, u64> {
        &self.event_counts
    }

    pub fn event_total(&self) -> u64 {
        self.event_total
    }

    pub fn n_counts(&self) -> &BTreeMap<u64, u64> {
        &self.n_counts
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    /// Distinct observed events plus one bucket for everything unseen.
    pub fn vocab_size(&self) -> u64 {
        self.event_counts.len() as u64 + 1
    }

    pub fn event_count(&self, event: &Event) -> u64 {
        self.event_counts.get(event).copied().unwrap_or(0)
    }

    /// Add-alpha estimate `(count + alpha) / (total + alpha * vocab)`.
    pub fn event_prob(&self, event: &Event) -> f64 {
        (self.event_count(event) as f64 + self.alpha)
            / (self.event_total as f64 + self.alpha * self.vocab_size() as f64)
    }

    /// Numerator and denominator of the add-one estimate of P(n). The
    /// support is the set of observed counts plus one overflow bucket that
    /// absorbs every unseen n.
    pub fn n_prob_ratio(&self, n: u64) -> (u64, u64) {
        let count = self.n_counts.get(&n).copied().unwrap_or(0);
        (count + 1, self.n_total + self.n_counts.len() as u64 + 1)
    }

    pub fn n_prob(&self, n: u64) -> f64 {
        let (num, den) = self.n_prob_ratio(n);
        num as f64 / den as f64
    }

    pub fn to_json(&self) -> Value {
        let events: Vec<Value> = self
            .event_counts
            .iter()
            .map(|(e, &c)| {
                let mut row: Vec<Value> = e.parts().iter().map(|p| json!(p)).collect();
                row.push(json!(c));
                Value::Array(row)
            })
            .collect();
        let n_counts: Vec<Value> = self.n_counts.iter().map(|(n, c)| json!([n, c])).collect();
        json!({
            "kind": self.kind.as_str(),
            "alpha": self.alpha,
            "event_counts": events,
            "n_counts": n_counts,
            "event_total": self.event_total,
            "n_total": self.n_total,
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(value: &Value) -> Result<Self, StatsError> {
        let bad = |msg: &str| StatsError::Format(msg.to_string());
        let kind: EventKind = value["kind"]
            .as_str()
            .ok_or_else(|| bad("missing `kind`"))?
            .parse()?;
        let alpha = value["alpha"]
            .as_f64()
            .ok_or_else(|| bad("missing `alpha`"))?;
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(StatsError::NonPositiveAlpha(alpha));
        }
        let mut event_counts = BTreeMap::new();
        for row in value["event_counts"]
            .as_array()
            .ok_or_else(|| bad("missing `event_counts`"))?
        {
            let row = row
                .as_array()
                .ok_or_else(|| bad("event row is not an array"))?;
            let (count, parts) = row.split_last().ok_or_else(|| bad("empty event row"))?;
            let count = count
                .as_u64()
                .ok_or_else(|| bad("event count is not an integer"))?;
            let parts = parts
                .iter()
                .map(|p| p.as_str().ok_or_else(|| bad("event part is not a string")))
                .collect::<Result<Vec<_>, _>>()?;
            if event_counts
                .insert(Event::new(kind, parts)?, count)
                .is_some()
            {
                return Err(bad("duplicate event"));
            }
        }
        let mut n_counts = BTreeMap::new();
        for row in value["n_counts"]
            .as_array()
            .ok_or_else(|| bad("missing `n_counts`"))?
        {
            let pair = row
                .as_array()
                .filter(|r| r.len() == 2)
                .ok_or_else(|| bad("n_counts rows are [n, count]"))?;
            let n = pair[0].as_u64().ok_or_else(|| bad("n is not an integer"))?;
            let c = pair[1]
                .as_u64()
                .ok_or_else(|| bad("count is not an integer"))?;
            n_counts.insert(n, c);
        }
        let event_total = value["event_total"]
            .as_u64()
            .ok_or_else(|| bad("missing `event_total`"))?;
        let n_total = value["n_total"]
            .as_u64()
            .ok_or_else(|| bad("missing `n_total`"))?;
        if event_counts.values().sum::<u64>() != event_total {
            return Err(bad("event_total disagrees with event_counts"));
        }
        if n_counts.values().sum::<u64>() != n_total || n_total == 0 {
            return Err(bad("n_total disagrees with n_counts"));
        }
        Ok(ProbabilityModel {
            kind,
            alpha,
            event_counts,
            event_total,
            n_counts,
            n_total,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, StatsError> {
        Self::from_json(&serde_json::from_str(text)?)
    }
}

impl EventDistribution for ProbabilityModel {
    fn event_prob(&self, event: &Event) -> f64 {
        ProbabilityModel::event_prob(self, event)
    }

    fn n_prob(&self, n: u64) -> f64 {
        ProbabilityModel::n_prob(self, n)
    }
}
