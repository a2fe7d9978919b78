//! Sweep configuration and the flat `key = value` config-file format.
//!
//! Settings are layered: defaults, then the config file, then command-line
//! flags. Flags are funnelled through the same key table as the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dicke_core::{BasisKind, ModelParams};

use crate::error::{usage, CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisSelection {
    Fock,
    Coherent,
    Both,
}

impl BasisSelection {
    pub fn kinds(self) -> &'static [BasisKind] {
        match self {
            BasisSelection::Fock => &[BasisKind::Fock],
            BasisSelection::Coherent => &[BasisKind::Coherent],
            BasisSelection::Both => &[BasisKind::Fock, BasisKind::Coherent],
        }
    }
}

impl FromStr for BasisSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fock" => Ok(BasisSelection::Fock),
            "coherent" => Ok(BasisSelection::Coherent),
            "both" => Ok(BasisSelection::Both),
            other => Err(format!("unknown basis '{other}' (expected fock, coherent or both)")),
        }
    }
}

impl fmt::Display for BasisSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisSelection::Fock => "fock",
            BasisSelection::Coherent => "coherent",
            BasisSelection::Both => "both",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Evenly spaced couplings, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GammaGrid {
    pub fn values(&self) -> Vec<f64> {
        let span = self.max - self.min;
        let last = (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + span * i as f64 / last).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub js: Vec<f64>,
    pub gamma: GammaGrid,
    pub omega: f64,
    pub delta: f64,
    pub basis: BasisSelection,
    pub states: usize,
    pub tolerance: f64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub threads: usize,
    pub max_dim: usize,
}

pub fn available_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl Default for SweepConfig {
    /// The figure preset: j ∈ {1, 2, 5, 10, 20}, 81 couplings on [0, 2], resonance.
    fn default() -> Self {
        Self {
            js: vec![1.0, 2.0, 5.0, 10.0, 20.0],
            gamma: GammaGrid { min: 0.0, max: 2.0, points: 81 },
            omega: 1.0,
            delta: 1.0,
            basis: BasisSelection::Coherent,
            states: 2,
            tolerance: 1e-6,
            output: None,
            format: OutputFormat::Csv,
            threads: available_threads(),
            max_dim: dicke_core::matrix::DEFAULT_MAX_DIM,
        }
    }
}

pub const KEYS: &[&str] = &[
    "j",
    "gamma_min",
    "gamma_max",
    "gamma_points",
    "omega",
    "delta",
    "basis",
    "states",
    "tolerance",
    "output",
    "format",
    "threads",
    "max_dim",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| CliError::Usage(format!("invalid value '{value}' for {key}: {e}")))
}

impl SweepConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "j" => {
                self.js = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse::<f64>(key, s))
                    .collect::<Result<_>>()?
            }
            "gamma_min" => self.gamma.min = parse(key, value)?,
            "gamma_max" => self.gamma.max = parse(key, value)?,
            "gamma_points" => self.gamma.points = parse(key, value)?,
            "omega" => self.omega = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "basis" => self.basis = parse(key, value)?,
            "states" => self.states = parse(key, value)?,
            "tolerance" => self.tolerance = parse(key, value)?,
            "output" => self.output = Some(PathBuf::from(value.trim())),
            "format" => self.format = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "max_dim" => self.max_dim = parse(key, value)?,
            other => return usage(format!("unknown setting '{other}' (known: {})", KEYS.join(", "))),
        }
        Ok(())
    }

    pub fn apply(&mut self, settings: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in settings {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.js.is_empty() {
            return usage("at least one j is required");
        }
        if self.gamma.points < 2 {
            return usage(format!("gamma_points must be at least 2, got {}", self.gamma.points));
        }
        if !(self.gamma.max > self.gamma.min) {
            return usage(format!("gamma grid must be increasing ({} .. {})", self.gamma.min, self.gamma.max));
        }
        if self.states == 0 {
            return usage("states must be positive");
        }
        if !(self.tolerance > 0.0) {
            return usage(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.threads == 0 {
            return usage("threads must be positive");
        }
        for &j in &self.js {
            for gamma in [self.gamma.min, self.gamma.max] {
                ModelParams::new(self.omega, self.delta, gamma, j).map_err(|e| CliError::Usage(e.to_string()))?;
            }
        }
        Ok(())
    }
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!("config line {}: expected key = value, got '{raw}'", i + 1));
        };
        let k = k.trim().to_string();
        if !KEYS.contains(&k.as_str()) {
            return usage(format!("config line {}: unknown setting '{k}'", i + 1));
        }
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return usage(format!("config line {}: duplicate setting '{k}'", i + 1));
        }
    }
    Ok(out)
}
