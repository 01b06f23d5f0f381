//! Flat `key = value` run configuration. Command-line flags override file
//! entries; keys outside [`KEYS`] are rejected.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Every recognised configuration key.
pub const KEYS: &[&str] = &[
    "input",
    "out",
    "family",
    "n",
    "seed",
    "sigma",
    "longitude_spread",
    "mode",
    "level",
    "epsilon",
    "r",
    "bandwidth_rule",
    "k_max",
    "kernel",
    "kernel_s",
    "field",
    "backend",
    "budget_simplices",
    "m",
    "p_max",
    "p_min",
    "y_max",
    "svg",
    "text_barcode",
    "min_length",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("config line {}: expected `key = value`", i + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if cfg.entries.contains_key(key) {
                return Err(CliError::Config(format!(
                    "config line {}: duplicate key `{key}`",
                    i + 1
                )));
            }
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(crate::file_err(path))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies overrides on top of this configuration.
    pub fn merge(mut self, overrides: RunConfig) -> Self {
        self.entries.extend(overrides.entries);
        self
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(KEYS.contains(&key), "{key}");
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::Config(format!("invalid value `{v}` for `{key}`")))
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let cfg =
            RunConfig::parse("# run\nepsilon = 0.2\nlevel=0.5  # comment\n\nk_max = 2\n").unwrap();
        assert_eq!(cfg.get::<f64>("epsilon").unwrap(), Some(0.2));
        let mut flags = RunConfig::default();
        flags.set("epsilon", "0.1").unwrap();
        let merged = cfg.merge(flags);
        assert_eq!(merged.require::<f64>("epsilon").unwrap(), 0.1);
        assert_eq!(merged.require::<usize>("k_max").unwrap(), 2);
        assert_eq!(merged.get::<f64>("r").unwrap(), None);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            RunConfig::parse("epsilom = 0.2"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            RunConfig::parse("epsilon 0.2"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            RunConfig::parse("r = 1\nr = 2"),
            Err(CliError::Config(_))
        ));
        let cfg = RunConfig::parse("k_max = two").unwrap();
        assert!(matches!(
            cfg.get::<usize>("k_max"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            cfg.require::<f64>("level"),
            Err(CliError::Config(_))
        ));
    }
}
