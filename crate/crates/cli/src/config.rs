//! Flat key=value experiment configuration. Files mirror the CLI flags;
//! flags override file values. Serialization is canonical (sorted keys),
//! so `serialize(parse(text))` normalizes any accepted document.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {0}: expected `key = value`, got `{1}`")]
    Syntax(usize, String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    Fixed(f64),
    OneMinusInvN,
    OneMinusInvSqrtN,
}

impl Schedule {
    pub fn q_for(&self, n: u32) -> f64 {
        match self {
            Schedule::Fixed(q) => *q,
            Schedule::OneMinusInvN => 1.0 - 1.0 / n as f64,
            Schedule::OneMinusInvSqrtN => 1.0 - 1.0 / (n as f64).sqrt(),
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, Schedule::Fixed(_))
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Fixed(_) => write!(f, "fixed"),
            Schedule::OneMinusInvN => write!(f, "one_minus_inv_n"),
            Schedule::OneMinusInvSqrtN => write!(f, "one_minus_inv_sqrt_n"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// Fully-resolved experiment configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub n_list: Vec<u32>,
    pub schedule: Schedule,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub x_max: f64,
    pub grid_points: usize,
    pub functions: Vec<String>,
    pub tail_tol: f64,
    pub max_terms: usize,
    pub audit_tol: f64,
    pub format: Format,
    pub out: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n_list: vec![5, 20, 100],
            schedule: Schedule::Fixed(0.8),
            mu: 0.0,
            alpha: 0.0,
            beta: 0.0,
            x_max: 4.0,
            grid_points: 21,
            functions: vec![
                "t".into(),
                "t^2".into(),
                "sqrt_t".into(),
                "t_over_1_plus_t".into(),
                "1_minus_exp_neg_t".into(),
            ],
            tail_tol: 1e-14,
            max_terms: 10_000,
            audit_tol: 1e-8,
            format: Format::Csv,
            out: None,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>().map_err(|e| ConfigError::Value {
                key: key.to_string(),
                message: format!("`{s}`: {e}"),
            })
        })
        .collect()
}

fn parse_scalar<T: FromStr>(key: &str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>().map_err(|e| ConfigError::Value {
        key: key.to_string(),
        message: format!("`{raw}`: {e}"),
    })
}

impl Config {
    /// Apply one key=value pair; used for both file lines and flag merging.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "n_list" => self.n_list = parse_list(key, value)?,
            "q" => self.schedule = Schedule::Fixed(parse_scalar(key, value)?),
            "q_schedule" => {
                self.schedule = match value {
                    "one_minus_inv_n" => Schedule::OneMinusInvN,
                    "one_minus_inv_sqrt_n" => Schedule::OneMinusInvSqrtN,
                    "fixed" => self.schedule, // keeps the current q
                    other => {
                        return Err(ConfigError::Value {
                            key: key.to_string(),
                            message: format!("unknown schedule `{other}`"),
                        })
                    }
                }
            }
            "mu" => self.mu = parse_scalar(key, value)?,
            "alpha" => self.alpha = parse_scalar(key, value)?,
            "beta" => self.beta = parse_scalar(key, value)?,
            "x_max" => self.x_max = parse_scalar(key, value)?,
            "grid_points" => self.grid_points = parse_scalar(key, value)?,
            "functions" => self.functions = parse_list(key, value)?,
            "tail_tol" => self.tail_tol = parse_scalar(key, value)?,
            "max_terms" => self.max_terms = parse_scalar(key, value)?,
            "audit_tol" => self.audit_tol = parse_scalar(key, value)?,
            "format" => {
                self.format = value.parse().map_err(|e| ConfigError::Value {
                    key: key.to_string(),
                    message: e,
                })?
            }
            "out" => self.out = Some(value.to_string()),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Parse a flat key=value document on top of defaults. `#` starts a
    /// comment; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        // q_schedule=fixed must see a q= line regardless of file order
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax(i + 1, line.to_string()))?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0)); // `q` sorts before `q_schedule`
        for (key, value) in &pairs {
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    /// Canonical serialization: sorted keys, one pair per line.
    pub fn serialize(&self) -> String {
        let mut map: BTreeMap<&str, String> = BTreeMap::new();
        map.insert(
            "n_list",
            self.n_list.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
        );
        match self.schedule {
            Schedule::Fixed(q) => {
                map.insert("q", format!("{q}"));
                map.insert("q_schedule", "fixed".into());
            }
            other => {
                map.insert("q_schedule", other.to_string());
            }
        }
        map.insert("mu", format!("{}", self.mu));
        map.insert("alpha", format!("{}", self.alpha));
        map.insert("beta", format!("{}", self.beta));
        map.insert("x_max", format!("{}", self.x_max));
        map.insert("grid_points", format!("{}", self.grid_points));
        map.insert("functions", self.functions.join(","));
        map.insert("tail_tol", format!("{:e}", self.tail_tol));
        map.insert("max_terms", format!("{}", self.max_terms));
        map.insert("audit_tol", format!("{:e}", self.audit_tol));
        map.insert("format", if self.format == Format::Csv { "csv".into() } else { "json".into() });
        if let Some(out) = &self.out {
            map.insert("out", out.clone());
        }
        map.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_list.is_empty() {
            return Err(ConfigError::Invalid("n_list must not be empty".into()));
        }
        if self.n_list.iter().any(|&n| n == 0) {
            return Err(ConfigError::Invalid("n_list entries must be >= 1".into()));
        }
        if let Schedule::Fixed(q) = self.schedule {
            if !(q > 0.0 && q < 1.0) {
                return Err(ConfigError::Invalid(format!("q must lie in (0,1), got {q}")));
            }
        }
        if self.schedule == Schedule::OneMinusInvN && self.n_list.iter().any(|&n| n < 2) {
            return Err(ConfigError::Invalid(
                "one_minus_inv_n needs n >= 2 so that q_n is in (0,1)".into(),
            ));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "tail_tol must lie in (0,1), got {}",
                self.tail_tol
            )));
        }
        if self.max_terms < 8 {
            return Err(ConfigError::Invalid(format!(
                "max_terms must be at least 8, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }
}
