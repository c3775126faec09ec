use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use super::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "manifest",
    "synonyms",
    "frequencies",
    "alpha",
    "models",
    "feature_table",
    "mode",
    "threshold",
    "alignment",
    "pairs_per_class",
    "dataset",
    "n_trees",
    "max_depth",
    "min_leaf",
    "features_per_split",
    "k_folds",
    "seed",
    "out",
];

/// Flat `key = value` settings. `#` starts a comment line.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{origin}:{}: expected `key = value`",
                    idx + 1
                )));
            };
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "{origin}:{}: unknown key `{key}`",
                    idx + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Config::parse(&text, &path.display().to_string())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if given, else the config value, else `None`.
    pub fn resolve<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Usage(format!("config key `{key}`: bad value `{v}`")))
            })
            .transpose()
    }

    pub fn resolve_or<T: FromStr>(
        &self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        Ok(self.resolve(key, flag)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        self.resolve(key, flag)?.ok_or_else(|| {
            CliError::Usage(format!(
                "missing `--{}` (or `{key}` in the config file)",
                key.replace('_', "-")
            ))
        })
    }
}
