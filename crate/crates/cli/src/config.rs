//! Run configuration: built-in defaults, overridden by an optional key=value
//! config file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use frontera::{Error, Mode, Result};

/// Input file layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    /// `date`-headed CSV of simple returns.
    ReturnsCsv,
    /// `date`-headed CSV of prices, converted to returns.
    PricesCsv,
    /// Ken-French 10-industry monthly text file.
    French10,
}

/// Output rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Fully resolved options for one command invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub kind: Kind,
    pub percent: bool,
    pub split: Option<String>,
    pub interval: Option<(f64, f64)>,
    pub msr_rate: f64,
    pub no_short: bool,
    pub grid: usize,
    pub horizons: Option<Vec<usize>>,
    pub mode: Mode,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub precision: Option<usize>,
}

/// Raw values from a config file; every field optional.
#[derive(Debug, Default)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub kind: Option<Kind>,
    pub percent: Option<bool>,
    pub split: Option<String>,
    pub interval: Option<(f64, f64)>,
    pub msr_rate: Option<f64>,
    pub no_short: Option<bool>,
    pub grid: Option<usize>,
    pub horizons: Option<Vec<usize>>,
    pub mode: Option<Mode>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub precision: Option<usize>,
}

pub fn parse_interval(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text.split_once(':').ok_or_else(|| {
        Error::InvalidInput(format!("interval must be R1:R2, got {text:?}"))
    })?;
    let r1: f64 = a.trim().parse().map_err(|e| {
        Error::InvalidInput(format!("bad interval lower bound {a:?}: {e}"))
    })?;
    let r2: f64 = b.trim().parse().map_err(|e| {
        Error::InvalidInput(format!("bad interval upper bound {b:?}: {e}"))
    })?;
    Ok((r1, r2))
}

pub fn parse_horizons(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidInput(format!("bad horizon {tok:?}: {e}")))
        })
        .collect()
}

fn parse_bool(value: &str, key: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::InvalidInput(format!(
            "config key {key}: expected a boolean, got {other:?}"
        ))),
    }
}

fn parse_kind(value: &str) -> Result<Kind> {
    match value {
        "returns_csv" => Ok(Kind::ReturnsCsv),
        "prices_csv" => Ok(Kind::PricesCsv),
        "french10" => Ok(Kind::French10),
        other => Err(Error::InvalidInput(format!(
            "unknown input kind {other:?}, expected returns_csv|prices_csv|french10"
        ))),
    }
}

fn parse_format(value: &str) -> Result<Format> {
    match value {
        "table" => Ok(Format::Table),
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(Error::InvalidInput(format!(
            "unknown format {other:?}, expected table|csv|json"
        ))),
    }
}

/// Parse a `key = value` config file. `#` starts a comment. Keys mirror the
/// long flag names.
pub fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = FileConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!(
                "config line {}: expected key = value, got {raw:?}",
                lineno + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "input" => cfg.input = Some(PathBuf::from(value)),
            "kind" => cfg.kind = Some(parse_kind(value)?),
            "percent" => cfg.percent = Some(parse_bool(value, key)?),
            "split" => cfg.split = Some(value.to_string()),
            "interval" => cfg.interval = Some(parse_interval(value)?),
            "msr-rate" => {
                cfg.msr_rate = Some(value.parse().map_err(|e| {
                    Error::InvalidInput(format!("config key msr-rate: {e}"))
                })?)
            }
            "no-short" => cfg.no_short = Some(parse_bool(value, key)?),
            "grid" => {
                cfg.grid = Some(value.parse().map_err(|e| {
                    Error::InvalidInput(format!("config key grid: {e}"))
                })?)
            }
            "horizons" => cfg.horizons = Some(parse_horizons(value)?),
            "mode" => cfg.mode = Some(value.parse()?),
            "format" => cfg.format = Some(parse_format(value)?),
            "out" => cfg.out = Some(PathBuf::from(value)),
            "precision" => {
                cfg.precision = Some(value.parse().map_err(|e| {
                    Error::InvalidInput(format!("config key precision: {e}"))
                })?)
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "config line {}: unknown key {other:?}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(cfg)
}
