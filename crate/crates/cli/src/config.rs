//! Run configuration: a flat JSON file, command-line flags, and the
//! `LATE_TERMS_PRECISION` environment default, merged in that order of
//! increasing priority (flags win, the environment only replaces the
//! built-in default).

use late_terms_core::numerics::{parse_rational, DEFAULT_PRECISION};
use late_terms_core::problems::PROBLEM_IDS;
use late_terms_core::{ProblemKind, Rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const PRECISION_ENV: &str = "LATE_TERMS_PRECISION";
pub const DEFAULT_N_START: u32 = 5;
pub const DEFAULT_RICHARDSON: [u32; 3] = [1, 2, 3];
/// Below this MPFR loses the guard digits the ratio path relies on.
pub const MIN_PRECISION: u32 = 32;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config file {path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("missing required setting `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] late_terms_core::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    pub n_max: u32,
    #[serde(default = "default_n_start")]
    pub n_start: u32,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default = "default_richardson")]
    pub richardson_orders: Vec<u32>,
}

fn default_n_start() -> u32 {
    DEFAULT_N_START
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

fn default_richardson() -> Vec<u32> {
    DEFAULT_RICHARDSON.to_vec()
}

/// Parameter values may be written as JSON strings or bare numbers.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ParamValue {
    Text(String),
    Number(serde_json::Number),
}

impl ParamValue {
    fn into_string(self) -> String {
        match self {
            ParamValue::Text(s) => s,
            ParamValue::Number(n) => n.to_string(),
        }
    }
}

/// Every field optional; what a config file or the flags may supply.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub problem: Option<String>,
    #[serde(default, deserialize_with = "deserialize_params")]
    pub params: BTreeMap<String, String>,
    pub n_max: Option<u32>,
    pub n_start: Option<u32>,
    pub precision_bits: Option<u32>,
    pub richardson_orders: Option<Vec<u32>>,
}

fn deserialize_params<'de, D>(d: D) -> Result<BTreeMap<String, String>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let raw = BTreeMap::<String, ParamValue>::deserialize(d)?;
    Ok(raw.into_iter().map(|(k, v)| (k, v.into_string())).collect())
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: display.clone(), source })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Json { path: display, source })
    }

    /// `other` wins field by field; parameters merge key by key.
    pub fn overlay(mut self, other: PartialConfig) -> Self {
        self.problem = other.problem.or(self.problem);
        self.params.extend(other.params);
        self.n_max = other.n_max.or(self.n_max);
        self.n_start = other.n_start.or(self.n_start);
        self.precision_bits = other.precision_bits.or(self.precision_bits);
        self.richardson_orders = other.richardson_orders.or(self.richardson_orders);
        self
    }

    /// Fills defaults and validates. `env_precision` is the raw value of
    /// [`PRECISION_ENV`], if set.
    pub fn resolve(self, env_precision: Option<&str>) -> Result<RunConfig, ConfigError> {
        let default_bits = match env_precision {
            Some(raw) => raw
                .trim()
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("{PRECISION_ENV}={raw} is not a bit count")))?,
            None => DEFAULT_PRECISION,
        };
        let config = RunConfig {
            problem: self.problem.ok_or(ConfigError::Missing("problem"))?,
            params: self.params,
            n_max: self.n_max.ok_or(ConfigError::Missing("n_max"))?,
            n_start: self.n_start.unwrap_or(DEFAULT_N_START),
            precision_bits: self.precision_bits.unwrap_or(default_bits),
            richardson_orders: self.richardson_orders.unwrap_or_else(default_richardson),
        };
        config.validate()?;
        Ok(config)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.problem_kind()?;
        if self.n_max == 0 {
            return Err(ConfigError::Invalid("n_max must be at least 1".into()));
        }
        if self.n_start < 2 {
            return Err(ConfigError::Invalid(format!(
                "n_start must be at least 2 (the late-term models start there), got {}",
                self.n_start
            )));
        }
        if self.precision_bits < MIN_PRECISION {
            return Err(ConfigError::Invalid(format!(
                "precision_bits must be at least {MIN_PRECISION}, got {}",
                self.precision_bits
            )));
        }
        if self.richardson_orders.contains(&0) {
            return Err(ConfigError::Invalid("Richardson orders start at 1".into()));
        }
        Ok(())
    }

    pub fn problem_kind(&self) -> Result<ProblemKind, ConfigError> {
        if !PROBLEM_IDS.contains(&self.problem.as_str()) {
            return Err(ConfigError::Invalid(format!(
                "unknown problem `{}`; valid ids are {}",
                self.problem,
                PROBLEM_IDS.join(", ")
            )));
        }
        let params = self
            .params
            .iter()
            .map(|(k, v)| Ok((k.clone(), parse_rational(v)?)))
            .collect::<Result<BTreeMap<String, Rational>, late_terms_core::Error>>()?;
        Ok(ProblemKind::from_id(&self.problem, &params)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// Splits a `k=v` flag.
pub fn parse_param(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("empty parameter name in `{s}`"));
    }
    Ok((k.to_string(), v.trim().to_string()))
}
