//! The `qsense` command-line harness.
//!
//! ```text
//! qsense figure <id> [--shots N] [--seed S] [--fidelity F] [--readout ideal|default|PATH] [--out FILE]
//! qsense sweep <config.json> [same flags]
//! qsense validate <config.json>
//! qsense qfim --state zero|rho-star|singlet --alpha A --theta T --phi P [--fidelity F]
//! qsense protocol <kind> --alpha A --theta T --phi P [...]
//! ```

pub mod config;
pub mod figures;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::experiment::sampling::sample_shots;
use crate::information::{qfim_sld, qfim_tagged_ensemble, schur_alpha_bound, AlphaBound, FisherMatrix3};
use crate::numeric::{kron, CMat};
use crate::protocols::{protocol_distribution, protocol_fim, AncillaAxisMode, Axis, NoiseSpec, ProtocolKind};
use crate::rotations::{axis_unitary, RotationParams};
use crate::states::{depolarized_singlet, rho_star, PureState};

pub use config::{load_config, validate_config, Diagnostic, ExperimentConfig, Grid, ReadoutSpec};
pub use figures::{run_figure, FigureId, FigureOptions};
pub use output::{Artifact, Table};
pub use sweep::run_sweep;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config:\n{}", render(.0))]
    InvalidConfig(Vec<Diagnostic>),
    #[error("{0}")]
    Usage(String),
}

fn render(d: &[Diagnostic]) -> String {
    d.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Parser)]
#[command(name = "qsense", version, about = "Rotation-angle sensing: information bounds and simulated experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct RunFlags {
    /// Shots per point; 0 uses exact probabilities.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Singlet-preparation fidelity.
    #[arg(long)]
    pub fidelity: Option<f64>,
    /// `ideal`, `default`, or a confusion-matrix JSON file.
    #[arg(long)]
    pub readout: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AngleFlags {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    /// Single probe in |0⟩.
    Zero,
    /// The tagged ensemble x+, y+, z+ with a classical ancilla.
    RhoStar,
    /// Probe half of a (depolarized) singlet.
    Singlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    SingleQubit,
    Hindsight,
    Agnostic,
    AncillaTagged,
    BellBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    X,
    Y,
    Z,
    Adaptive,
}

impl AxisArg {
    fn axis(self) -> Option<Axis> {
        match self {
            AxisArg::X => Some(Axis::X),
            AxisArg::Y => Some(Axis::Y),
            AxisArg::Z => Some(Axis::Z),
            AxisArg::Adaptive => None,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regenerate the data behind a figure.
    Figure {
        id: FigureId,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Quantum Fisher information matrix and the α-only bound.
    Qfim {
        #[arg(long, value_enum, default_value = "zero")]
        state: StateArg,
        #[command(flatten)]
        angles: AngleFlags,
        #[arg(long, default_value_t = 1.0)]
        fidelity: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Outcome distribution and classical FIM of one protocol.
    Protocol {
        #[arg(value_enum)]
        kind: KindArg,
        #[command(flatten)]
        angles: AngleFlags,
        /// Initial-state angle of the single-qubit probe.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        /// Single-qubit observable.
        #[arg(long, value_enum, default_value = "y")]
        obs: AxisArg,
        /// Hindsight ancilla axis.
        #[arg(long, value_enum, default_value = "adaptive")]
        ancilla: AxisArg,
        /// Entangling gates in the measurement that also depolarize.
        #[arg(long, default_value_t = 0)]
        gates_meas: u8,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a parameter sweep from a config file.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Check a config file; exit status 0 iff it is valid.
    Validate { config: PathBuf },
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, v: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).expect("plain data");
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io {
            path: p.clone(),
            source: e,
        }),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
    }
}

fn bound_json(b: &AlphaBound) -> serde_json::Value {
    match b {
        AlphaBound::Bound(v) => json!({"bound": v}),
        AlphaBound::NonIdentifiable(why) => json!({"non_identifiable": why}),
    }
}

/// QFIM of a named input state under `U(α, n̂)` on the probe.
pub fn state_qfim(state: StateArg, at: &RotationParams, fidelity: f64) -> Result<FisherMatrix3, Error> {
    match state {
        StateArg::Zero => {
            let zero = PureState::from_bloch_angles(0.0, 0.0);
            Ok(qfim_sld(|p| Ok(zero.evolve(&axis_unitary(p))?.density()), at)?.0)
        }
        StateArg::RhoStar => qfim_tagged_ensemble(&rho_star(), at),
        StateArg::Singlet => {
            let rho = depolarized_singlet(fidelity)?;
            Ok(qfim_sld(|p| rho.evolve(&kron(&axis_unitary(p), &CMat::identity(2))?), at)?.0)
        }
    }
}

fn protocol_kind(kind: KindArg, lambda: f64, obs: AxisArg, ancilla: AxisArg) -> Result<ProtocolKind, CliError> {
    Ok(match kind {
        KindArg::SingleQubit => ProtocolKind::SingleQubit {
            lambda,
            obs_axis: obs
                .axis()
                .ok_or_else(|| CliError::Usage("--obs must be x, y or z".into()))?,
        },
        KindArg::Hindsight => ProtocolKind::Hindsight {
            ancilla: match ancilla.axis() {
                Some(a) => AncillaAxisMode::Fixed(a),
                None => AncillaAxisMode::Adaptive,
            },
        },
        KindArg::Agnostic => ProtocolKind::Agnostic,
        KindArg::AncillaTagged => ProtocolKind::AncillaTagged,
        KindArg::BellBasis => ProtocolKind::BellBasis,
    })
}

fn figure_options(flags: &RunFlags) -> FigureOptions {
    FigureOptions {
        shots: flags.shots,
        seed: flags.seed,
        fidelity: flags.fidelity,
        readout: flags.readout.as_deref().map(ReadoutSpec::from_arg),
        out: flags.out.clone(),
        base: None,
    }
}

/// Executes a parsed command, writing reports to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Figure { id, flags } => {
            let art = run_figure(id, &figure_options(&flags))?;
            writeln!(out, "wrote {} ({} rows) and {}", art.csv.display(), art.table.rows.len(), art.sidecar.display())
                .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })?;
            Ok(0)
        }
        Command::Qfim { state, angles, fidelity, out: path } => {
            let at = RotationParams::new(angles.alpha, angles.theta, angles.phi)?;
            let m = state_qfim(state, &at, fidelity)?;
            let v = json!({
                "state": format!("{state:?}"),
                "params": at,
                "fidelity": fidelity,
                "qfim": m.entries(),
                "alpha_bound": bound_json(&schur_alpha_bound(&m)),
            });
            emit(out, path.as_ref(), &v)?;
            Ok(0)
        }
        Command::Protocol { kind, angles, lambda, obs, ancilla, gates_meas, flags } => {
            let at = RotationParams::new(angles.alpha, angles.theta, angles.phi)?;
            let noise = NoiseSpec::new(flags.fidelity.unwrap_or(1.0), gates_meas)?;
            let kind = protocol_kind(kind, lambda, obs, ancilla)?;
            let d = protocol_distribution(&kind, &at, &noise)?;
            let fim = protocol_fim(&kind, &at, &noise)?;
            let mut v = json!({
                "protocol": kind,
                "params": at,
                "noise": noise,
                "distribution": d,
                "fim": fim.entries(),
                "alpha_bound": bound_json(&schur_alpha_bound(&fim)),
            });
            if let Some(n) = flags.shots.filter(|&n| n > 0) {
                v["shots"] = serde_json::to_value(sample_shots(&d, n, flags.seed.unwrap_or(0))?).expect("plain data");
            }
            emit(out, flags.out.as_ref(), &v)?;
            Ok(0)
        }
        Command::Sweep { config, flags } => {
            let mut cfg = load_config(&config)?;
            let base = config::config_dir(&config).to_path_buf();
            if let Some(s) = flags.shots {
                cfg.shots = s as i64;
            }
            if let Some(s) = flags.seed {
                cfg.seed = s;
            }
            if let Some(f) = flags.fidelity {
                cfg.noise.prep_fidelity = f;
            }
            if let Some(r) = flags.readout {
                // Command-line paths are relative to the working directory.
                let abs = match r.as_str() {
                    "ideal" | "default" => r,
                    p => std::path::absolute(p)
                        .map_err(|e| CliError::Io { path: p.into(), source: e })?
                        .to_string_lossy()
                        .into_owned(),
                };
                cfg.readout = ReadoutSpec::Named(abs);
            }
            if let Some(o) = flags.out {
                cfg.output = o;
            }
            let art = run_sweep(&cfg, &base)?;
            writeln!(out, "wrote {} ({} rows) and {}", art.csv.display(), art.table.rows.len(), art.sidecar.display())
                .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })?;
            Ok(0)
        }
        Command::Validate { config } => {
            let diags = validate_config(&config)?;
            for d in &diags {
                writeln!(out, "{d}").map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })?;
            }
            if diags.is_empty() {
                writeln!(out, "{}: ok", config.display())
                    .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })?;
                Ok(0)
            } else {
                Ok(1)
            }
        }
    }
}

/// Parses `args` (program name first) and runs. Returns the process exit code.
pub fn run_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
