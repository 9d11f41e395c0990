use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::tokenize::AliasMap;
use crate::error::{Error, Result};

/// Analysis settings, read from a `key = value` file.
///
/// ```text
/// # comment
/// min_count = 5
/// active_names = mother, father, ellie
/// alias = my mother -> mother
/// alias = my father -> father
/// k_nearest = 10
/// rng_seed = 42
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub min_count: u32,
    pub active_names: Vec<String>,
    pub alias_map: AliasMap,
    pub k_nearest: usize,
    pub rng_seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            min_count: 5,
            active_names: Vec::new(),
            alias_map: AliasMap::new(),
            k_nearest: 10,
            rng_seed: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = AnalysisConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| Error::Config { line: line_no, message };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "min_count" => {
                    cfg.min_count = value
                        .parse()
                        .ok()
                        .filter(|&v: &u32| v > 0)
                        .ok_or_else(|| err(format!("min_count must be a positive integer, got {value:?}")))?;
                }
                "k_nearest" => {
                    cfg.k_nearest = value
                        .parse()
                        .ok()
                        .filter(|&v: &usize| v > 0)
                        .ok_or_else(|| err(format!("k_nearest must be a positive integer, got {value:?}")))?;
                }
                "rng_seed" => {
                    cfg.rng_seed = value
                        .parse()
                        .map_err(|_| err(format!("rng_seed must be an unsigned integer, got {value:?}")))?;
                }
                "active_names" => {
                    cfg.active_names = value
                        .split(',')
                        .map(|s| s.trim().to_lowercase())
                        .filter(|s| !s.is_empty())
                        .collect();
                }
                "alias" => {
                    let (phrase, canonical) = value
                        .split_once("->")
                        .ok_or_else(|| err(format!("alias must be `phrase -> token`, got {value:?}")))?;
                    cfg.alias_map
                        .insert(phrase.trim(), canonical.trim())
                        .map_err(|e| err(e.to_string()))?;
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    /// Canonical text form; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "min_count = {}", self.min_count);
        let _ = writeln!(out, "active_names = {}", self.active_names.join(", "));
        for (phrase, canonical) in self.alias_map.iter() {
            let _ = writeln!(out, "alias = {phrase} -> {canonical}");
        }
        let _ = writeln!(out, "k_nearest = {}", self.k_nearest);
        let _ = writeln!(out, "rng_seed = {}", self.rng_seed);
        out
    }
}
