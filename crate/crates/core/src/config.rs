//! `key=value` run configuration with `#` comments.
//!
//! Precedence, lowest first: built-in defaults, the config file, `CMPDP_*`
//! environment variables, command-line flags. Keys are case-insensitive.

use std::fs;
use std::path::Path;
use std::time::Duration;

use thiserror::Error;

use crate::nn::Geometry;
use crate::solvers::SearchLimit;
use crate::train::{Selection, TrainConfig};

pub const ENV_PREFIX: &str = "CMPDP_";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected key=value, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value for {key}: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub local_search_ms: u64,
    /// Node budget of the exact oracle during evaluation; `None` is unlimited.
    pub exact_budget: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            local_search_ms: 200,
            exact_budget: Some(5_000_000),
        }
    }
}

pub const KEYS: &[&str] = &[
    "problem",
    "epochs",
    "batch_size",
    "lr",
    "k",
    "l",
    "d",
    "m",
    "mixed",
    "graphs_per_refresh",
    "pairs_per_graph",
    "epochs_per_refresh",
    "val_fraction",
    "drop_ties",
    "cross_pairs",
    "deterministic",
    "select",
    "seed",
    "local_search_ms",
    "exact_budget",
];

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| invalid(key, format!("cannot parse {value:?}")))
}

fn flag(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(invalid(
            key,
            format!("expected true/false, found {value:?}"),
        )),
    }
}

impl RunConfig {
    pub fn local_search_limit(&self) -> SearchLimit {
        SearchLimit::time(Duration::from_millis(self.local_search_ms))
    }

    /// Sets one key without cross-field validation; see [`RunConfig::validate`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let k = key.as_str();
        let t = &mut self.train;
        match k {
            "problem" => t.problem = value.parse().map_err(|e: String| invalid(k, e))?,
            "epochs" | "total_epochs" => t.total_epochs = num(k, value)?,
            "batch_size" => t.batch_size = num(k, value)?,
            "lr" => t.lr = num(k, value)?,
            "k" => t.geometry.k = num(k, value)?,
            "l" => t.geometry.l = num(k, value)?,
            "d" | "p" => t.geometry.p = num(k, value)?,
            "m" => t.m = num(k, value)?,
            "mixed" => t.mixed = flag(k, value)?,
            "graphs_per_refresh" => t.graphs_per_refresh = num(k, value)?,
            "pairs_per_graph" => t.pairs_per_graph = num(k, value)?,
            "epochs_per_refresh" => t.epochs_per_refresh = num(k, value)?,
            "val_fraction" => t.val_fraction = num(k, value)?,
            "drop_ties" => t.drop_ties = flag(k, value)?,
            "cross_pairs" => t.cross_pairs = flag(k, value)?,
            "deterministic" => t.deterministic = flag(k, value)?,
            "select" => {
                t.selection = match value {
                    "best" => Selection::BestValidation,
                    "last" => Selection::Last,
                    _ => return Err(invalid(k, "expected best or last")),
                }
            }
            "seed" => t.seed = num(k, value)?,
            "local_search_ms" => self.local_search_ms = num(k, value)?,
            "exact_budget" => {
                self.exact_budget = match value {
                    "none" | "unlimited" => None,
                    v => Some(num(k, v)?),
                }
            }
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    /// Cross-field checks; errors name the offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = self.train.geometry;
        Geometry::new(g.k, g.p, g.l).map_err(|e| {
            let key = if g.k == 0 {
                "k"
            } else if g.p == 0 {
                "d"
            } else {
                "l"
            };
            invalid(key, e.to_string())
        })?;
        self.train.validate().map_err(|msg| {
            let key = msg
                .split_whitespace()
                .next()
                .unwrap_or("config")
                .to_string();
            ConfigError::Invalid { key, message: msg }
        })
    }

    /// Applies `CMPDP_<KEY>` variables from `vars`.
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(
        &mut self,
        vars: I,
    ) -> Result<(), ConfigError> {
        for (name, value) in vars {
            if let Some(key) = name.strip_prefix(ENV_PREFIX) {
                self.set(key, &value)?;
            }
        }
        Ok(())
    }
}

/// Parses config text on top of the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        cfg.set(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    parse_config(&fs::read_to_string(path)?)
}
