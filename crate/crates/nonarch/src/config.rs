//! Run configuration: defaults, an optional JSON file named by
//! `NONARCH_CONFIG`, then command-line flags.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::field::Field;

pub const CONFIG_ENV: &str = "NONARCH_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Digits of `π`-adic precision.
    pub precision: usize,
    /// Laurent truncation degree.
    pub truncation: usize,
    /// Default coefficient field: `0`, `p` or `p^d`.
    pub field: String,
    pub output: OutputFormat,
    pub pretty: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { precision: 32, truncation: 24, field: "0".into(), output: OutputFormat::Text, pretty: false }
    }
}

/// Every key optional; unknown keys are rejected.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    #[serde(default)]
    pub precision: Option<usize>,
    #[serde(default)]
    pub truncation: Option<usize>,
    #[serde(default, rename = "char")]
    pub field: Option<String>,
    #[serde(default)]
    pub output: Option<OutputFormat>,
    #[serde(default)]
    pub pretty: Option<bool>,
}

impl Config {
    pub fn merge(mut self, p: &PartialConfig) -> Self {
        if let Some(n) = p.precision {
            self.precision = n;
        }
        if let Some(d) = p.truncation {
            self.truncation = d;
        }
        if let Some(f) = &p.field {
            self.field = f.clone();
        }
        if let Some(o) = p.output {
            self.output = o;
        }
        if let Some(b) = p.pretty {
            self.pretty = b;
        }
        self
    }

    pub fn load_file(path: &str) -> Result<PartialConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision == 0 || self.truncation == 0 {
            bail!(Parse, "precision and truncation must be at least 1");
        }
        parse_field(&self.field).map(|_| ())
    }

    pub fn field(&self) -> Result<Field> {
        parse_field(&self.field)
    }
}

/// `0` (rationals), `p`, or `p^d`.
pub fn parse_field(s: &str) -> Result<Field> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad field descriptor `{s}` (expected 0, p or p^d)"));
    let (p, d) = match s.split_once('^') {
        Some((p, d)) => (p.trim().parse::<u32>().map_err(|_| bad())?, d.trim().parse::<u32>().map_err(|_| bad())?),
        None => (s.parse::<u32>().map_err(|_| bad())?, 1),
    };
    let f = match (p, d) {
        (0, _) => Ok(Field::rationals()),
        (p, 1) => Field::prime(p),
        (p, d) => Field::extension_auto(p, d),
    };
    f.map_err(|e| Error::Parse(format!("field `{s}`: {e}")))
}
