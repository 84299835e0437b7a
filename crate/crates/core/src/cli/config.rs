//! Experiment configuration files and their validation.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiment::readout::{ConfusionMatrix, PROBE_READOUT_FIDELITY};
use crate::protocols::{NoiseSpec, ProtocolKind};

use super::CliError;

/// A sweep coordinate: one value, an explicit list, or an inclusive linspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Value(f64),
    List(Vec<f64>),
    Linspace { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Value(v) => vec![*v],
            Grid::List(v) => v.clone(),
            Grid::Linspace { start, stop, points } => linspace(*start, *stop, *points),
        }
    }
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|k| {
                if k + 1 == n {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Readout model: `"ideal"`, `"default"` (per-qubit symmetric 0.978 probe, 0.989 ancilla),
/// a path to a confusion-matrix JSON file, or an inline `{"rows": ...}` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReadoutSpec {
    Named(String),
    Matrix(ConfusionMatrix),
}

impl Default for ReadoutSpec {
    fn default() -> Self {
        ReadoutSpec::Named("ideal".into())
    }
}

impl ReadoutSpec {
    /// Parses a `--readout` argument.
    pub fn from_arg(s: &str) -> Self {
        ReadoutSpec::Named(s.to_string())
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, ReadoutSpec::Named(s) if s == "ideal")
    }

    /// Resolves to the matrix for a `k`-outcome table, `None` when ideal.
    /// Relative paths are taken from `base`.
    pub fn resolve(&self, k: usize, base: &Path) -> Result<Option<ConfusionMatrix>, CliError> {
        let m = match self {
            ReadoutSpec::Named(s) if s == "ideal" => return Ok(None),
            ReadoutSpec::Named(s) if s == "default" => match k {
                2 => ConfusionMatrix::symmetric(PROBE_READOUT_FIDELITY)?,
                4 => ConfusionMatrix::default_two_qubit(),
                _ => {
                    return Err(CliError::Usage(format!(
                        "default readout model covers 2 or 4 outcomes, not {k}"
                    )))
                }
            },
            ReadoutSpec::Named(path) => {
                let p = base.join(path);
                let text = std::fs::read_to_string(&p).map_err(|e| CliError::Io {
                    path: p.clone(),
                    source: e,
                })?;
                ConfusionMatrix::from_json(&text)?
            }
            ReadoutSpec::Matrix(m) => m.clone(),
        };
        if m.dim() != k {
            return Err(CliError::Usage(format!(
                "readout matrix is {0}x{0} but the protocol has {k} outcomes",
                m.dim()
            )));
        }
        Ok(Some(m))
    }
}

/// A parameter sweep run by `qsense sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: ProtocolKind,
    pub theta: Grid,
    #[serde(default = "zero_grid")]
    pub phi: Grid,
    pub alpha: Grid,
    /// Shots per sweep point; 0 selects exact probabilities.
    #[serde(default)]
    pub shots: i64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub readout: ReadoutSpec,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn zero_grid() -> Grid {
    Grid::Value(0.0)
}

fn default_output() -> PathBuf {
    PathBuf::from("sweep.csv")
}

/// One problem found in a config file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// Offending field, or `"<json>"` for syntax errors.
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn check_grid(
    out: &mut Vec<Diagnostic>,
    name: &str,
    g: &Grid,
    lo: f64,
    hi: f64,
    hi_open: bool,
    range: &str,
) {
    if let Grid::Linspace { points: 0, .. } = g {
        out.push(Diagnostic::new(name, "linspace needs at least one point"));
        return;
    }
    let v = g.values();
    if v.is_empty() {
        out.push(Diagnostic::new(name, "grid is empty"));
    }
    for (i, x) in v.iter().enumerate() {
        let inside = x.is_finite() && *x >= lo && if hi_open { *x < hi } else { *x <= hi };
        if !inside {
            out.push(Diagnostic::new(
                format!("{name}[{i}]"),
                format!("value {x} is outside {range}"),
            ));
        }
    }
}

impl ExperimentConfig {
    /// Range and consistency checks. `base` resolves relative readout paths.
    pub fn diagnostics(&self, base: &Path) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        check_grid(&mut out, "theta", &self.theta, 0.0, PI, false, "[0, pi]");
        check_grid(&mut out, "phi", &self.phi, 0.0, 2.0 * PI, true, "[0, 2pi)");
        check_grid(&mut out, "alpha", &self.alpha, -PI, PI, false, "[-pi, pi]");
        if self.shots < 0 {
            out.push(Diagnostic::new(
                "shots",
                format!("value {} is outside [0, inf) (0 selects exact mode)", self.shots),
            ));
        }
        if let Err(e) = self.noise.validate() {
            out.push(Diagnostic::new("noise", e.to_string()));
        }
        if let ProtocolKind::SingleQubit { lambda, .. } = self.protocol {
            if !lambda.is_finite() {
                out.push(Diagnostic::new("protocol.lambda", "must be finite"));
            }
        }
        match &self.readout {
            ReadoutSpec::Named(s) if s == "ideal" || s == "default" => {}
            ReadoutSpec::Named(path) => {
                let p = base.join(path);
                match std::fs::read_to_string(&p) {
                    Err(e) => out.push(Diagnostic::new(
                        "readout",
                        format!("cannot read {}: {e}", p.display()),
                    )),
                    Ok(text) => {
                        if let Err(e) = ConfusionMatrix::from_json(&text) {
                            out.push(Diagnostic::new("readout", e.to_string()));
                        }
                    }
                }
            }
            ReadoutSpec::Matrix(_) => {}
        }
        if self.output.as_os_str().is_empty() {
            out.push(Diagnostic::new("output", "path is empty"));
        }
        out
    }

    /// Shots as an unsigned count; assumes the config passed validation.
    pub fn shot_count(&self) -> u64 {
        self.shots.max(0) as u64
    }
}

/// Parses config text. Syntax and type errors carry the JSON line and column.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    serde_json::from_str(text).map_err(|e| {
        vec![Diagnostic::new(
            "<json>",
            format!("line {}, column {}: {e}", e.line(), e.column()),
        )]
    })
}

/// Reads and checks a config file. An empty list means the file is valid.
pub fn validate_config(path: &Path) -> Result<Vec<Diagnostic>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(match parse_config(&text) {
        Ok(cfg) => cfg.diagnostics(config_dir(path)),
        Err(d) => d,
    })
}

/// Loads a config and fails on any diagnostic.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let diags = validate_config(path)?;
    if !diags.is_empty() {
        return Err(CliError::InvalidConfig(diags));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_config(&text).map_err(CliError::InvalidConfig)
}

pub fn config_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}
