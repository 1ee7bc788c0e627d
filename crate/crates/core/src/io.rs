//! Statistics files and structured reports.
//!
//! A statistics file is either flat `key = value` text (one pair per line,
//! `#` starts a comment) or a JSON object with the same keys:
//!
//! ```text
//! mean_equity_return      = 1.0698
//! mean_risk_free_rate     = 1.008
//! mean_consumption_growth = 1.018
//! sd_consumption_growth   = 0.036
//! beta                    = 0.99   # optional
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::calibration::{EconomyStatistics, DEFAULT_BETA};
use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const REQUIRED: [&str; 4] = [
    "mean_equity_return",
    "mean_risk_free_rate",
    "mean_consumption_growth",
    "sd_consumption_growth",
];
const OPTIONAL: [&str; 1] = ["beta"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsFile {
    pub mean_equity_return: f64,
    pub mean_risk_free_rate: f64,
    pub mean_consumption_growth: f64,
    pub sd_consumption_growth: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

fn default_beta() -> f64 {
    DEFAULT_BETA
}

impl From<StatsFile> for EconomyStatistics {
    fn from(s: StatsFile) -> Self {
        EconomyStatistics {
            mean_equity_return: s.mean_equity_return,
            mean_risk_free: s.mean_risk_free_rate,
            mean_growth: s.mean_consumption_growth,
            sd_growth: s.sd_consumption_growth,
            beta: s.beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedStats {
    pub stats: StatsFile,
    /// One entry per unrecognised key.
    pub warnings: Vec<String>,
}

fn parse_error(line: Option<usize>, field: Option<&str>, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        field: field.map(str::to_owned),
        message: message.into(),
    }
}

/// Parse a statistics file in either supported format.
pub fn parse_stats(text: &str) -> Result<ParsedStats> {
    if text.trim_start().starts_with('{') {
        parse_stats_json(text)
    } else {
        parse_stats_kv(text)
    }
}

pub fn parse_stats_kv(text: &str) -> Result<ParsedStats> {
    let mut values: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    let mut unknown = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_error(
                Some(lineno),
                None,
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        let Some(known) = REQUIRED.iter().chain(OPTIONAL.iter()).find(|k| **k == key) else {
            unknown.push(key.to_owned());
            continue;
        };
        let number: f64 = value.parse().map_err(|_| {
            parse_error(
                Some(lineno),
                Some(known),
                format!("`{value}` is not a number"),
            )
        })?;
        if values.insert(known, (number, lineno)).is_some() {
            return Err(parse_error(Some(lineno), Some(known), "duplicate key"));
        }
    }
    let lookup = |k: &str| values.get(k).copied();
    finish(lookup, unknown)
}

pub fn parse_stats_json(text: &str) -> Result<ParsedStats> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| parse_error(Some(e.line()), None, format!("invalid JSON: {e}")))?;
    let serde_json::Value::Object(map) = value else {
        return Err(parse_error(None, None, "expected a JSON object"));
    };
    let mut values: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    let mut unknown = Vec::new();
    for (key, v) in &map {
        let Some(known) = REQUIRED.iter().chain(OPTIONAL.iter()).find(|k| *k == key) else {
            unknown.push(key.clone());
            continue;
        };
        let number = v
            .as_f64()
            .ok_or_else(|| parse_error(None, Some(known), format!("`{v}` is not a number")))?;
        values.insert(known, (number, 0));
    }
    let lookup = |k: &str| values.get(k).copied();
    finish(lookup, unknown)
}

fn finish(
    lookup: impl Fn(&str) -> Option<(f64, usize)>,
    unknown: Vec<String>,
) -> Result<ParsedStats> {
    let get = |key: &str, required: bool| -> Result<Option<f64>> {
        match lookup(key) {
            None if required => Err(parse_error(None, Some(key), "missing required field")),
            None => Ok(None),
            Some((v, line)) => {
                let line = (line > 0).then_some(line);
                if !(v > 0.0 && v.is_finite()) {
                    return Err(parse_error(
                        line,
                        Some(key),
                        format!("must be positive, got {v}"),
                    ));
                }
                if key == "beta" && v > 1.0 {
                    return Err(parse_error(
                        line,
                        Some(key),
                        format!("must not exceed 1, got {v}"),
                    ));
                }
                Ok(Some(v))
            }
        }
    };
    let stats = StatsFile {
        mean_equity_return: get(REQUIRED[0], true)?.unwrap_or_default(),
        mean_risk_free_rate: get(REQUIRED[1], true)?.unwrap_or_default(),
        mean_consumption_growth: get(REQUIRED[2], true)?.unwrap_or_default(),
        sd_consumption_growth: get(REQUIRED[3], true)?.unwrap_or_default(),
        beta: get(OPTIONAL[0], false)?.unwrap_or(DEFAULT_BETA),
    };
    let warnings = if unknown.is_empty() {
        Vec::new()
    } else {
        vec![format!("ignoring unknown keys: {}", unknown.join(", "))]
    };
    Ok(ParsedStats { stats, warnings })
}

/// A scalar entry in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Integer(u64),
    Number(f64),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Number(v)
    }
}
impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Integer(v)
    }
}
impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Integer(v as u64)
    }
}
impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}
impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}
impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            Value::Integer(v) => Some(*v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Output of one command, renderable as text or JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub diagnostics: BTreeMap<String, Value>,
    #[serde(default)]
    pub tables: Vec<Table>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            tool_version: TOOL_VERSION.to_owned(),
            seed: None,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            tables: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_owned(), v.into());
        self
    }

    pub fn output(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.outputs.insert(key.to_owned(), v.into());
        self
    }

    pub fn diagnostic(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.diagnostics.insert(key.to_owned(), v.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| parse_error(Some(e.line()), None, format!("invalid report: {e}")))
    }

    /// Plain-text rendering with 12 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ccapm {} v{}", self.command, self.tool_version);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        for (title, section) in [
            ("inputs", &self.inputs),
            ("outputs", &self.outputs),
            ("diagnostics", &self.diagnostics),
        ] {
            if section.is_empty() {
                continue;
            }
            let _ = writeln!(out, "\n[{title}]");
            let width = section.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in section {
                let _ = writeln!(out, "  {k:<width$}  {}", format_value(v));
            }
        }
        for table in &self.tables {
            let _ = writeln!(out, "\n[{}]", table.title);
            let header: Vec<String> = table.columns.iter().map(|c| format!("{c:>20}")).collect();
            let _ = writeln!(out, "{}", header.join(""));
            for row in &table.rows {
                let cells: Vec<String> = row
                    .iter()
                    .map(|v| format!("{:>20}", format_number(*v)))
                    .collect();
                let _ = writeln!(out, "{}", cells.join(""));
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "\nwarning: {w}");
        }
        out
    }
}

fn format_value(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Integer(i) => i.to_string(),
        Value::Number(x) => format_number(*x),
        Value::Text(s) => s.clone(),
    }
}

/// Twelve significant digits, fixed-point for moderate magnitudes.
pub fn format_number(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..9).contains(&magnitude) {
        let decimals = (11 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}
