//! Session settings merged from a TOML file and command-line flags.

use std::path::Path;

use poisson_core::poisson::SearchConfig;
use poisson_core::{CoordinateRing, Ring};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

/// Contents of a configuration file; every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub vars: Option<Vec<String>>,
    pub invertible: Option<Vec<String>>,
    pub order: Option<usize>,
    pub weight_bound: Option<i64>,
    pub exponent_box: Option<i32>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config file {path}: {source}")]
    Toml {
        path: String,
        source: toml::de::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Toml {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    /// Declared variables; `None` means infer them from the expressions.
    pub vars: Option<Vec<String>>,
    pub invertible: Vec<String>,
    /// ħ truncation order; `None` means the command's default.
    pub order: Option<usize>,
    pub search: SearchConfig,
    pub format: Format,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 20240601;

impl SessionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.search.weight_bound < 1 {
            return Err(ConfigError::Invalid("weight bound must be positive".into()));
        }
        if self.search.exponent_box < 1 {
            return Err(ConfigError::Invalid("exponent box must be positive".into()));
        }
        if let Some(vars) = &self.vars {
            if vars.is_empty() {
                return Err(ConfigError::Invalid(
                    "at least one variable is required".into(),
                ));
            }
        }
        Ok(())
    }

    /// The coordinate ring: declared variables, or `found` sorted by name.
    pub fn ring(&self, found: &[String], reserved: &[&str]) -> Result<Ring, ConfigError> {
        let mut names = match &self.vars {
            Some(v) => v.clone(),
            None => {
                let mut v: Vec<String> = found.iter().chain(&self.invertible).cloned().collect();
                v.sort();
                v.dedup();
                v
            }
        };
        if names.is_empty() {
            names.push("x".to_string());
        }
        for n in &names {
            if n == "h" || reserved.contains(&n.as_str()) {
                return Err(ConfigError::Invalid(format!(
                    "`{n}` is reserved and cannot be a variable"
                )));
            }
        }
        CoordinateRing::new(&names, &self.invertible)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn order_or(&self, default: usize) -> usize {
        self.order.unwrap_or(default)
    }
}
