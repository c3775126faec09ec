use std::fmt;
use std::str::FromStr;

use crate::features::{parse_feature_code, FeatureClass, N_FEATURES};

/// Which features an `evaluate` run trains on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSpec {
    Baseline,
    All,
    Only(FeatureClass),
    AllMinus(FeatureClass),
    Single(usize),
}

impl FeatureSpec {
    /// Zero-based feature indices; empty for the baseline.
    pub fn indices(self) -> Vec<usize> {
        match self {
            FeatureSpec::Baseline => Vec::new(),
            FeatureSpec::All => (0..N_FEATURES).collect(),
            FeatureSpec::Only(c) => c.indices(),
            FeatureSpec::AllMinus(c) => {
                let drop = c.indices();
                (0..N_FEATURES).filter(|i| !drop.contains(i)).collect()
            }
            FeatureSpec::Single(i) => vec![i],
        }
    }

    /// Baseline, all features, each class alone, then all minus each class.
    pub fn ablation_grid() -> Vec<FeatureSpec> {
        let mut grid = vec![FeatureSpec::Baseline, FeatureSpec::All];
        grid.extend(FeatureClass::ALL.map(FeatureSpec::Only));
        grid.extend(FeatureClass::ALL.map(FeatureSpec::AllMinus));
        grid
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSpec::Baseline => f.write_str("baseline"),
            FeatureSpec::All => f.write_str("all"),
            FeatureSpec::Only(c) => write!(f, "{c}"),
            FeatureSpec::AllMinus(c) => write!(f, "all-minus-{c}"),
            FeatureSpec::Single(i) => write!(f, "single:F{}", i + 1),
        }
    }
}

impl FromStr for FeatureSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.trim().to_ascii_lowercase();
        let unknown = || format!("unknown feature spec `{s}`");
        match lower.as_str() {
            "baseline" => return Ok(FeatureSpec::Baseline),
            "all" => return Ok(FeatureSpec::All),
            _ => {}
        }
        if let Some(class) = lower.strip_prefix("all-minus-") {
            return class
                .parse()
                .map(FeatureSpec::AllMinus)
                .map_err(|_| unknown());
        }
        if let Some(code) = lower.strip_prefix("single:") {
            return parse_feature_code(code)
                .map(FeatureSpec::Single)
                .ok_or_else(unknown);
        }
        lower.parse().map(FeatureSpec::Only).map_err(|_| unknown())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_sizes() {
        let n = |s: &str| s.parse::<FeatureSpec>().unwrap().indices().len();
        assert_eq!(n("coherence"), 4);
        assert_eq!(n("cohesion"), 2);
        assert_eq!(n("surface"), 3);
        assert_eq!(n("lexical"), 3);
        assert_eq!(n("syntactic"), 4);
        assert_eq!(n("all"), 16);
        assert_eq!(n("all-minus-coherence"), 12);
        assert_eq!(n("all-minus-cohesion"), 14);
        assert_eq!(n("baseline"), 0);
        assert_eq!(
            "single:F1".parse::<FeatureSpec>().unwrap().indices(),
            vec![0]
        );
        assert_eq!(
            "coherence".parse::<FeatureSpec>().unwrap().indices(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn grid_has_twelve_rows_and_round_trips() {
        let grid = FeatureSpec::ablation_grid();
        assert_eq!(grid.len(), 12);
        for spec in grid {
            assert_eq!(spec.to_string().parse::<FeatureSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn rejects_unknown() {
        for bad in [
            "colour",
            "all-minus-",
            "single:F17",
            "single:x",
            "all-minus-all",
        ] {
            assert!(bad.parse::<FeatureSpec>().is_err(), "{bad}");
        }
    }
}
