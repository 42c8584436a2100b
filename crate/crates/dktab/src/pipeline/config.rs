//! Experiment configuration: one JSON file, every field overridable by a
//! long-form flag of the same dotted name (`--dkt.hidden_size 32`).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{ColumnSchema, SplitSpec};
use crate::dkt::DktConfig;
use crate::error::{Error, Result};
use crate::tabddpm::GenConfig;

/// Optional environment variable naming the root under which relative
/// output directories are placed.
pub const OUTPUT_DIR_ENV: &str = "DKTAB_OUT";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DataConfig {
    pub path: PathBuf,
    #[serde(default)]
    pub schema: ColumnSchema,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ExperimentConfig {
    pub data: DataConfig,
    /// Fractions used for every per-seed split; the seed field is the
    /// default for single-stage use and is replaced by each experiment
    /// seed inside `run` and `sweep`.
    pub split: SplitSpec,
    pub dkt: DktConfig,
    pub generator: GenConfig,
    /// Synthetic rows per seed for `run`.
    pub sample_count: usize,
    /// Synthetic row counts for `sweep`.
    pub sample_counts: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Classification threshold for accuracy/precision/recall.
    pub threshold: f64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data: DataConfig { path: PathBuf::from("corpus.csv"), schema: ColumnSchema::default() },
            split: SplitSpec::default(),
            dkt: DktConfig::default(),
            generator: GenConfig::default(),
            sample_count: 10_000,
            sample_counts: vec![1_000, 3_000, 5_000, 7_000, 10_000, 15_000, 30_000, 50_000, 100_000],
            seeds: vec![1, 2, 3, 4, 5],
            threshold: 0.5,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.split.validate()?;
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must be non-empty".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(Error::Config("seeds must be distinct".into()));
        }
        if !(0.0 < self.threshold && self.threshold < 1.0) {
            return Err(Error::Config(format!("threshold {} outside (0, 1)", self.threshold)));
        }
        Ok(())
    }

    /// Applies the output-root environment variable to a relative
    /// output_dir.
    pub fn resolve_output_root(&mut self) {
        if self.output_dir.is_relative() {
            if let Ok(root) = std::env::var(OUTPUT_DIR_ENV) {
                if !root.is_empty() {
                    self.output_dir = Path::new(&root).join(&self.output_dir);
                }
            }
        }
    }
}

/// Parses raw trailing CLI tokens of the form `--a.b.c value` or
/// `--a.b.c=value` into dotted-path/value pairs.
pub fn parse_override_tokens(tokens: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut iter = tokens.iter().peekable();
    while let Some(token) = iter.next() {
        let flag = token
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected a --dotted.path override, got `{token}`")))?;
        if let Some((path, value)) = flag.split_once('=') {
            out.push((path.to_string(), value.to_string()));
        } else {
            let value = iter
                .next()
                .ok_or_else(|| Error::Config(format!("override `--{flag}` is missing a value")))?;
            out.push((flag.to_string(), value.clone()));
        }
    }
    Ok(out)
}

/// Sets `path.to.field = value` inside a config JSON tree. Values parse as
/// JSON when possible and fall back to strings, so `--dkt.hidden_size 32`
/// and `--data.path corpus.csv` both work.
pub fn apply_overrides(tree: &mut serde_json::Value, overrides: &[(String, String)]) -> Result<()> {
    for (path, raw) in overrides {
        let pointer = format!("/{}", path.replace('.', "/"));
        let slot = tree
            .pointer_mut(&pointer)
            .ok_or_else(|| Error::Config(format!("unknown config field `{path}`")))?;
        let parsed = serde_json::from_str::<serde_json::Value>(raw).unwrap_or(serde_json::Value::String(raw.clone()));
        *slot = parsed;
    }
    Ok(())
}

/// Loads a config file (or the defaults when `path` is `None`) and applies
/// dotted-path overrides.
pub fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut tree = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p.display().to_string(), e))?;
            serde_json::from_str(&text)?
        }
        None => serde_json::to_value(ExperimentConfig::default())?,
    };
    // merge file values over defaults so partial configs are valid
    let mut base = serde_json::to_value(ExperimentConfig::default())?;
    merge(&mut base, &tree);
    tree = base;
    apply_overrides(&mut tree, overrides)?;
    let mut config: ExperimentConfig = serde_json::from_value(tree)?;
    config.resolve_output_root();
    config.validate()?;
    Ok(config)
}

fn merge(base: &mut serde_json::Value, patch: &serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_reach_nested_fields() {
        let mut tree = serde_json::to_value(ExperimentConfig::default()).unwrap();
        apply_overrides(
            &mut tree,
            &[
                ("dkt.hidden_size".into(), "32".into()),
                ("split.train_frac".into(), "0.1".into()),
                ("data.path".into(), "other.csv".into()),
            ],
        )
        .unwrap();
        let config: ExperimentConfig = serde_json::from_value(tree).unwrap();
        assert_eq!(config.dkt.hidden_size, 32);
        assert_eq!(config.split.train_frac, 0.1);
        assert_eq!(config.data.path, PathBuf::from("other.csv"));
    }

    #[test]
    fn unknown_field_rejected() {
        let mut tree = serde_json::to_value(ExperimentConfig::default()).unwrap();
        let err = apply_overrides(&mut tree, &[("dkt.nope".into(), "1".into())]).unwrap_err();
        assert!(err.to_string().contains("dkt.nope"));
    }

    #[test]
    fn token_parsing_both_forms() {
        let tokens: Vec<String> = ["--dkt.epochs=3", "--seeds", "[7,8]"].iter().map(|s| s.to_string()).collect();
        let pairs = parse_override_tokens(&tokens).unwrap();
        assert_eq!(pairs[0], ("dkt.epochs".to_string(), "3".to_string()));
        assert_eq!(pairs[1], ("seeds".to_string(), "[7,8]".to_string()));
    }

    #[test]
    fn duplicate_seeds_rejected() {
        let config = ExperimentConfig { seeds: vec![1, 1], ..ExperimentConfig::default() };
        assert!(config.validate().is_err());
    }

    #[test]
    fn partial_file_merges_over_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(&path, r#"{"sample_count": 123, "dkt": {"epochs": 2}}"#).unwrap();
        let config = load_config(Some(&path), &[]).unwrap();
        assert_eq!(config.sample_count, 123);
        assert_eq!(config.dkt.epochs, 2);
        assert_eq!(config.dkt.batch_size, DktConfig::default().batch_size);
    }
}
