//! Command-line flags, the optional `key = value` config file, and their
//! merge into a validated [`RunConfig`]. Flags beat file values, which beat
//! defaults.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use dqwalk_core::InitialState;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Exact position distribution at time t.
    Distribution,
    /// Exact mean and variance next to the long-time formulas, t = 1..T.
    Moments,
    /// fig1.csv, fig2.csv and fig3.csv in the output directory.
    Figures,
    /// Run the acceptance checks and report pass/fail.
    Verify,
    /// Distance to the Gaussian limit along a doubling schedule of times.
    Converge,
    /// Monte Carlo trajectory ensemble.
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Method {
    #[default]
    Renewal,
    Oracle,
    Superop,
    Mc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Renewal => "renewal",
            Method::Oracle => "oracle",
            Method::Superop => "superop",
            Method::Mc => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn parse_initial(s: &str) -> std::result::Result<InitialState, String> {
    InitialState::from_str(s)
}

const LONG_ABOUT: &str = "\
Exact and Monte Carlo distributions of the one-dimensional Hadamard walk \
measured in position and coin with probability p per step.

CSV output has a lowercase header row, rows ordered by t then x, and \
floats written with 17 significant digits. The Kolmogorov-Smirnov \
distance reported by `converge` compares the lattice CDF with the \
Gaussian CDF at the midpoints between neighbouring support sites.

A config file (--config) holds `key = value` lines with the same names \
as the long flags (p, t, initial, seed, samples, out, format, method, \
fast); `#` starts a comment.";

#[derive(Debug, Clone, Parser)]
#[command(name = "dqwalk", version, about = "Decoherent Hadamard walk toolkit", long_about = LONG_ABOUT)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Measurement probability per step, in [0, 1].
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Time (number of steps), or the largest time for tabulating commands.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<i64>,
    /// Initial state: symmetric, right or left.
    #[arg(long, value_parser = parse_initial)]
    pub initial: Option<InitialState>,
    /// Master seed for Monte Carlo.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo trajectories.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Output file (a directory for `figures`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Method for `distribution`.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Only checks whose times stay within 100 (for `verify`).
    #[arg(long)]
    pub fast: bool,
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub const DEFAULT_P: f64 = 0.5;
pub const DEFAULT_T: usize = 100;
pub const DEFAULT_SEED: u64 = 20_061_017;
pub const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub p: f64,
    pub t: usize,
    pub initial: InitialState,
    pub seed: Option<u64>,
    pub n_samples: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub method: Method,
    pub fast: bool,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            p: DEFAULT_P,
            t: DEFAULT_T,
            initial: InitialState::Symmetric,
            seed: None,
            n_samples: None,
            output_path: None,
            format: Format::Csv,
            method: Method::Renewal,
            fast: false,
        }
    }

    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => read_config_file(path)?,
            None => HashMap::new(),
        };
        let get = |key: &str| file.get(key).map(String::as_str);

        let mut cfg = Self::defaults(cli.command);
        if let Some(v) = get("p") {
            cfg.p = parse_value("p", v)?;
        }
        let mut t: Option<i64> = get("t").map(|v| parse_value("t", v)).transpose()?;
        if let Some(v) = get("initial") {
            cfg.initial = parse_initial(v).map_err(CliError::Config)?;
        }
        if let Some(v) = get("seed") {
            cfg.seed = Some(parse_value("seed", v)?);
        }
        if let Some(v) = get("samples") {
            cfg.n_samples = Some(parse_value("samples", v)?);
        }
        if let Some(v) = get("out") {
            cfg.output_path = Some(PathBuf::from(v));
        }
        if let Some(v) = get("format") {
            cfg.format = Format::from_str(v, true).map_err(CliError::Config)?;
        }
        if let Some(v) = get("method") {
            cfg.method = Method::from_str(v, true).map_err(CliError::Config)?;
        }
        if let Some(v) = get("fast") {
            cfg.fast = parse_value("fast", v)?;
        }

        if let Some(p) = cli.p {
            cfg.p = p;
        }
        if cli.t.is_some() {
            t = cli.t;
        }
        if let Some(i) = cli.initial {
            cfg.initial = i;
        }
        if cli.seed.is_some() {
            cfg.seed = cli.seed;
        }
        if cli.samples.is_some() {
            cfg.n_samples = cli.samples;
        }
        if cli.out.is_some() {
            cfg.output_path = cli.out.clone();
        }
        if let Some(f) = cli.format {
            cfg.format = f;
        }
        if let Some(m) = cli.method {
            cfg.method = m;
        }
        cfg.fast |= cli.fast;

        if let Some(t) = t {
            if t < 0 {
                return Err(CliError::Config(format!("t must be non-negative, got {t}")));
            }
            cfg.t = t as usize;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(CliError::Config(format!("p must lie in [0, 1], got {}", self.p)));
        }
        let needs_positive_p = matches!(self.command, Command::Moments | Command::Converge);
        if needs_positive_p && self.p == 0.0 {
            return Err(CliError::Config(
                "this command compares with formulas that need p > 0".into(),
            ));
        }
        if self.n_samples == Some(0) {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn samples_or_default(&self) -> u64 {
        self.n_samples.unwrap_or(DEFAULT_SAMPLES)
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    raw.parse()
        .map_err(|e| CliError::Config(format!("bad value '{raw}' for {key}: {e}")))
}

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<HashMap<String, String>> {
    const KEYS: [&str; 9] = ["p", "t", "initial", "seed", "samples", "out", "format", "method", "fast"];
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("line {}: unknown key '{key}'", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}
