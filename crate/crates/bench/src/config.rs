//! Benchmark configuration: defaults, the `key = value` file format, and
//! flag-over-file resolution.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use btai::DeepRewardConfig;

use crate::error::{BenchError, Result};

pub const DEFAULT_N_GOOD: usize = 2;
pub const DEFAULT_M_BAD: usize = 5;
pub const DEFAULT_LENGTHS: [usize; 2] = [5, 8];
pub const DEFAULT_PLANNING_ITERATIONS: usize = 25;
pub const DEFAULT_MAX_CYCLES: usize = 20;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_EXPLORATION: f64 = 2.0;
pub const DEFAULT_PREFERENCE: f64 = 0.9;

/// A fully resolved benchmark run.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub env: DeepRewardConfig,
    pub planning_iterations: usize,
    pub max_cycles: usize,
    pub trials: usize,
    pub exploration_constant: f64,
    pub preference_strength: f64,
    pub trace_path: Option<PathBuf>,
    /// Run trials on multiple threads. Off by default: parallel timings are
    /// not comparable to sequential ones.
    pub parallel: bool,
}

impl BenchmarkSpec {
    /// Merges configuration sources: flags override file values, defaults
    /// fill whatever remains, then everything is validated.
    pub fn resolve(file: Option<SpecOverrides>, flags: SpecOverrides) -> Result<Self> {
        let file = file.unwrap_or_default();
        let n_good = flags.n_good.or(file.n_good).unwrap_or(DEFAULT_N_GOOD);
        let m_bad = flags.m_bad.or(file.m_bad).unwrap_or(DEFAULT_M_BAD);
        let lengths = flags
            .lengths
            .or(file.lengths)
            .unwrap_or_else(|| DEFAULT_LENGTHS.to_vec());

        if n_good == 0 {
            return Err(invalid("n_good", "must be at least 1"));
        }
        if m_bad == 0 {
            return Err(invalid("m_bad", "must be at least 1"));
        }
        if lengths.len() != n_good {
            return Err(invalid(
                "lengths",
                &format!("{} entries given but n_good is {n_good}", lengths.len()),
            ));
        }
        if lengths.contains(&0) {
            return Err(invalid("lengths", "every path length must be at least 1"));
        }

        let spec = Self {
            env: DeepRewardConfig::new(n_good, m_bad, lengths)?,
            planning_iterations: flags
                .planning_iterations
                .or(file.planning_iterations)
                .unwrap_or(DEFAULT_PLANNING_ITERATIONS),
            max_cycles: flags
                .max_cycles
                .or(file.max_cycles)
                .unwrap_or(DEFAULT_MAX_CYCLES),
            trials: flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
            exploration_constant: flags
                .exploration_constant
                .or(file.exploration_constant)
                .unwrap_or(DEFAULT_EXPLORATION),
            preference_strength: flags
                .preference_strength
                .or(file.preference_strength)
                .unwrap_or(DEFAULT_PREFERENCE),
            trace_path: flags.trace_path.or(file.trace_path),
            parallel: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.planning_iterations == 0 {
            return Err(invalid("planning_iterations", "must be at least 1"));
        }
        if self.max_cycles == 0 {
            return Err(invalid("max_cycles", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if !self.exploration_constant.is_finite() || self.exploration_constant < 0.0 {
            return Err(invalid(
                "exploration_constant",
                &format!(
                    "must be a finite non-negative number, got {}",
                    self.exploration_constant
                ),
            ));
        }
        if !(self.preference_strength > 0.5 && self.preference_strength < 1.0) {
            return Err(invalid(
                "preference_strength",
                &format!(
                    "must lie strictly between 0.5 and 1, got {}",
                    self.preference_strength
                ),
            ));
        }
        Ok(())
    }
}

fn invalid(key: &'static str, message: &str) -> BenchError {
    BenchError::InvalidSpec {
        key,
        message: message.to_string(),
    }
}

/// Partial configuration from one source (a file or the command line).
/// `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpecOverrides {
    pub n_good: Option<usize>,
    pub m_bad: Option<usize>,
    pub lengths: Option<Vec<usize>>,
    pub planning_iterations: Option<usize>,
    pub max_cycles: Option<usize>,
    pub trials: Option<usize>,
    pub exploration_constant: Option<f64>,
    pub preference_strength: Option<f64>,
    pub trace_path: Option<PathBuf>,
}

impl SpecOverrides {
    /// Parses a line-oriented `key = value` configuration file. Blank lines
    /// and lines starting with `#` are skipped; unknown keys are rejected.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_named(&text, &path.display().to_string())
    }

    pub fn from_str_named(text: &str, path: &str) -> Result<Self> {
        let mut overrides = Self::default();
        for (index, raw_line) in text.lines().enumerate() {
            let line = index + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(config_error(path, line, "expected `key = value`"));
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "n_good" => overrides.n_good = Some(parse(path, line, key, value)?),
                "m_bad" => overrides.m_bad = Some(parse(path, line, key, value)?),
                "lengths" => overrides.lengths = Some(parse_lengths(path, line, value)?),
                "planning_iterations" => {
                    overrides.planning_iterations = Some(parse(path, line, key, value)?)
                }
                "max_cycles" => overrides.max_cycles = Some(parse(path, line, key, value)?),
                "trials" => overrides.trials = Some(parse(path, line, key, value)?),
                "exploration_constant" => {
                    overrides.exploration_constant = Some(parse(path, line, key, value)?)
                }
                "preference_strength" => {
                    overrides.preference_strength = Some(parse(path, line, key, value)?)
                }
                "trace_path" => overrides.trace_path = Some(PathBuf::from(value)),
                _ => {
                    return Err(config_error(path, line, &format!("unknown key `{key}`")));
                }
            }
        }
        Ok(overrides)
    }
}

fn config_error(path: &str, line: usize, message: &str) -> BenchError {
    BenchError::ConfigFile {
        path: path.to_string(),
        line,
        message: message.to_string(),
    }
}

fn parse<T>(path: &str, line: usize, key: &str, value: &str) -> Result<T>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| config_error(path, line, &format!("malformed value for `{key}`: {e}")))
}

fn parse_lengths(path: &str, line: usize, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|part| {
            part.trim().parse().map_err(|e| {
                config_error(path, line, &format!("malformed value for `lengths`: {e}"))
            })
        })
        .collect()
}

/// Output format of the benchmark report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "markdown" => Ok(Self::Markdown),
            other => Err(format!(
                "unknown format `{other}`, expected csv or markdown"
            )),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Markdown => "markdown",
        })
    }
}
