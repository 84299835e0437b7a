//! Figure-reproduction datasets.
//!
//! Column contracts:
//!
//! | id | columns |
//! |----|---------|
//! | `fig1c` | alpha, minus_y_estimate, minus_y_stderr, minus_y_theory |
//! | `fig1d` | lambda, theta, fi_estimate, fi_stderr, fi_theory |
//! | `fig2c`, `fig2d` | alpha, yz_estimate, yz_stderr, yz_theory, zz_estimate, zz_stderr, zz_theory |
//! | `fig2e` | theta, alpha, ya_estimate, ya_stderr, ya_theory |
//! | `fig2f` | theta, fi_estimate, fi_stderr, fi_theory |
//! | `fig3` | theta, phi, alpha, p0_estimate, p0_stderr, p0_theory |
//! | `figs1` | theta, phi, fi_x, fi_y, fi_z, fi_estimate, fi_stderr, fi_theory |
//! | `figs3` | fidelity, alpha, fi |

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Error;
use crate::experiment::readout::{
    apply_readout_noise, bayesian_unfold, ConfusionMatrix, UNFOLD_MAX_ITERS,
};
use crate::experiment::sampling::{replica_rng, sample_shots_with_rng};
use crate::experiment::{fit_fi_from_points, fit_fringe};
use crate::information::finite_fidelity_fi;
use crate::protocols::{
    adaptive_ancilla_axis, adaptive_probe_axis, agnostic_protocol, hindsight_correlator,
    hindsight_protocol_with_probe, protocol_fim, single_qubit_protocol, AncillaAxisMode, Axis,
    NoiseSpec, OutcomeDistribution, ProtocolKind,
};
use crate::rotations::RotationParams;
use crate::states::rho_star;

use super::config::{linspace, ReadoutSpec};
use super::output::{write_artifact, Artifact, Cell, Table};
use super::CliError;

pub const DEFAULT_SHOTS: u64 = 3000;
pub const DEFAULT_SEED: u64 = 1;
pub const ALPHA_POINTS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[derive(clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    #[value(name = "fig1c")]
    Fig1c,
    #[value(name = "fig1d")]
    Fig1d,
    #[value(name = "fig2c")]
    Fig2c,
    #[value(name = "fig2d")]
    Fig2d,
    #[value(name = "fig2e")]
    Fig2e,
    #[value(name = "fig2f")]
    Fig2f,
    #[value(name = "fig3")]
    Fig3,
    #[value(name = "figs1")]
    FigS1,
    #[value(name = "figs3")]
    FigS3,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig1c,
        FigureId::Fig1d,
        FigureId::Fig2c,
        FigureId::Fig2d,
        FigureId::Fig2e,
        FigureId::Fig2f,
        FigureId::Fig3,
        FigureId::FigS1,
        FigureId::FigS3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig1c => "fig1c",
            FigureId::Fig1d => "fig1d",
            FigureId::Fig2c => "fig2c",
            FigureId::Fig2d => "fig2d",
            FigureId::Fig2e => "fig2e",
            FigureId::Fig2f => "fig2f",
            FigureId::Fig3 => "fig3",
            FigureId::FigS1 => "figs1",
            FigureId::FigS3 => "figs3",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let lower = s.to_ascii_lowercase();
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == lower)
            .ok_or_else(|| CliError::Usage(format!("unknown figure id '{s}'")))
    }
}

/// Per-run overrides; unset fields take the figure defaults.
#[derive(Debug, Clone, Default)]
pub struct FigureOptions {
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    /// Singlet-preparation fidelity for the two-qubit figures; a single curve for `figs3`.
    pub fidelity: Option<f64>,
    pub readout: Option<ReadoutSpec>,
    pub out: Option<PathBuf>,
    /// Directory for relative readout paths.
    pub base: Option<PathBuf>,
}

struct Resolved {
    shots: u64,
    seed: u64,
    noise: NoiseSpec,
    readout: ReadoutSpec,
    base: PathBuf,
    out: PathBuf,
}

impl Resolved {
    fn sampler(&self, outcomes: usize) -> Result<Sampler, CliError> {
        Ok(Sampler {
            shots: self.shots,
            seed: self.seed,
            readout: self.readout.resolve(outcomes, &self.base)?,
        })
    }

    fn echo(&self, id: FigureId, extra: serde_json::Value) -> serde_json::Value {
        json!({
            "figure": id.name(),
            "shots": self.shots,
            "seed": self.seed,
            "noise": self.noise,
            "readout": self.readout,
            "grid": extra,
        })
    }
}

/// Turns exact distributions into estimates: readout noise, shots, then unfolding.
/// With zero shots the RNG is never touched.
pub struct Sampler {
    pub shots: u64,
    pub seed: u64,
    pub readout: Option<ConfusionMatrix>,
}

impl Sampler {
    pub fn estimate(&self, d: &OutcomeDistribution, stream: u64) -> Result<OutcomeDistribution, Error> {
        let observed = match &self.readout {
            Some(c) => apply_readout_noise(d, c)?,
            None => d.clone(),
        };
        let measured = if self.shots == 0 {
            observed
        } else {
            let mut rng = replica_rng(self.seed, stream);
            sample_shots_with_rng(&observed, self.shots, &mut rng)?.frequencies()?
        };
        match &self.readout {
            Some(c) => bayesian_unfold(&measured, c, UNFOLD_MAX_ITERS),
            None => Ok(measured),
        }
    }

    /// Shot-noise standard error of a ±1-valued mean `e`.
    pub fn pm_stderr(&self, e: f64) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            ((1.0 - e * e).max(0.0) / self.shots as f64).sqrt()
        }
    }

    /// Shot-noise standard error of a frequency `p`.
    pub fn freq_stderr(&self, p: f64) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            (p * (1.0 - p)).max(0.0).sqrt() / (self.shots as f64).sqrt()
        }
    }
}

fn rp(alpha: f64, theta: f64, phi: f64) -> Result<RotationParams, Error> {
    RotationParams::new(alpha, theta, phi)
}

fn alpha_grid() -> Vec<f64> {
    linspace(-PI, PI, ALPHA_POINTS)
}

/// `⟨A⊗B⟩` from a `++, +-, -+, --` distribution.
fn parity(d: &OutcomeDistribution) -> f64 {
    let p = d.probs();
    p[0] - p[1] - p[2] + p[3]
}

pub fn run_figure(id: FigureId, opts: &FigureOptions) -> Result<Artifact, CliError> {
    let fidelity = opts.fidelity.unwrap_or(1.0);
    let noise = NoiseSpec::new(fidelity, 0)?;
    let r = Resolved {
        shots: opts.shots.unwrap_or(DEFAULT_SHOTS),
        seed: opts.seed.unwrap_or(DEFAULT_SEED),
        noise,
        readout: opts.readout.clone().unwrap_or_default(),
        base: opts.base.clone().unwrap_or_else(|| PathBuf::from(".")),
        out: opts
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", id.name()))),
    };
    let (table, grid, summary) = match id {
        FigureId::Fig1c => fig1c(&r)?,
        FigureId::Fig1d => fig1d(&r)?,
        FigureId::Fig2c => fig2cd(&r, FRAC_PI_2)?,
        FigureId::Fig2d => fig2cd(&r, 0.0)?,
        FigureId::Fig2e => fig2e(&r)?,
        FigureId::Fig2f => fig2f(&r)?,
        FigureId::Fig3 => fig3(&r)?,
        FigureId::FigS1 => figs1(&r)?,
        FigureId::FigS3 => figs3(opts.fidelity)?,
    };
    write_artifact(id.name(), &r.out, table, r.echo(id, grid), summary)
}

type FigureData = (Table, serde_json::Value, serde_json::Value);

fn fig1c(r: &Resolved) -> Result<FigureData, CliError> {
    let s = r.sampler(2)?;
    let mut t = Table::new(&["alpha", "minus_y_estimate", "minus_y_stderr", "minus_y_theory"]);
    let mut pts = Vec::new();
    for (k, &a) in alpha_grid().iter().enumerate() {
        let d = single_qubit_protocol(0.0, &Axis::Y, &rp(a, FRAC_PI_2, 0.0)?)?;
        let est = s.estimate(&d, k as u64)?;
        let e = 2.0 * est.probs()[0] - 1.0;
        pts.push((a, est.probs()[0]));
        t.push(vec![a.into(), (-e).into(), s.pm_stderr(e).into(), a.sin().into()]);
    }
    let fit = fit_fi_from_points(&pts, 0.0)?;
    Ok((
        t,
        json!({"lambda": 0.0, "theta": FRAC_PI_2, "phi": 0.0, "observable": "y", "alpha_points": ALPHA_POINTS}),
        json!({"fi_estimate": fit.fi, "fi_stderr": fit.fi_stderr, "fi_theory": 1.0, "at_alpha": 0.0}),
    ))
}

fn fig1d(r: &Resolved) -> Result<FigureData, CliError> {
    let s = r.sampler(2)?;
    let mut t = Table::new(&["lambda", "theta", "fi_estimate", "fi_stderr", "fi_theory"]);
    let alphas = alpha_grid();
    let mut stream = 0u64;
    for lambda in [-FRAC_PI_4, 0.0] {
        for theta in linspace(0.0, PI, 21) {
            let mut pts = Vec::with_capacity(alphas.len());
            for &a in &alphas {
                let d = single_qubit_protocol(lambda, &Axis::Y, &rp(a, theta, 0.0)?)?;
                pts.push((a, s.estimate(&d, stream)?.probs()[0]));
                stream += 1;
            }
            let fit = fit_fi_from_points(&pts, 0.0)?;
            let theory = (theta - lambda).sin().powi(2);
            t.push(vec![lambda.into(), theta.into(), fit.fi.into(), fit.fi_stderr.into(), theory.into()]);
        }
    }
    Ok((
        t,
        json!({"lambda": [-FRAC_PI_4, 0.0], "theta_points": 21, "phi": 0.0, "observable": "y", "alpha_points": ALPHA_POINTS, "at_alpha": 0.0}),
        json!({}),
    ))
}

fn fig2cd(r: &Resolved, theta: f64) -> Result<FigureData, CliError> {
    let s = r.sampler(4)?;
    let mut t = Table::new(&[
        "alpha",
        "yz_estimate",
        "yz_stderr",
        "yz_theory",
        "zz_estimate",
        "zz_stderr",
        "zz_theory",
    ]);
    for (k, &a) in alpha_grid().iter().enumerate() {
        let p = rp(a, theta, 0.0)?;
        let mut row = vec![Cell::F(a)];
        for (j, probe) in [Axis::Y, Axis::Z].iter().enumerate() {
            let d = hindsight_protocol_with_probe(probe, &Axis::Z, &p, &r.noise)?;
            let e = parity(&s.estimate(&d, 2 * k as u64 + j as u64)?);
            let theory = hindsight_correlator(probe, &Axis::Z, &p, &r.noise)?;
            row.extend([Cell::F(e), Cell::F(s.pm_stderr(e)), Cell::F(theory)]);
        }
        t.push(row);
    }
    Ok((
        t,
        json!({"theta": theta, "phi": 0.0, "ancilla_axis": "z", "alpha_points": ALPHA_POINTS}),
        json!({}),
    ))
}

fn fig2e(r: &Resolved) -> Result<FigureData, CliError> {
    let s = r.sampler(4)?;
    let mut t = Table::new(&["theta", "alpha", "ya_estimate", "ya_stderr", "ya_theory"]);
    let mut stream = 0u64;
    for theta in [0.0, FRAC_PI_4, FRAC_PI_2] {
        for &a in &alpha_grid() {
            let p = rp(a, theta, 0.0)?;
            let anc = adaptive_ancilla_axis(&p);
            let probe = adaptive_probe_axis(&p, &anc);
            let d = hindsight_protocol_with_probe(&probe, &anc, &p, &r.noise)?;
            let e = parity(&s.estimate(&d, stream)?);
            stream += 1;
            let theory = hindsight_correlator(&probe, &anc, &p, &r.noise)?;
            t.push(vec![theta.into(), a.into(), e.into(), s.pm_stderr(e).into(), theory.into()]);
        }
    }
    Ok((
        t,
        json!({"theta": [0.0, FRAC_PI_4, FRAC_PI_2], "phi": 0.0, "ancilla_axis": "adaptive", "alpha_points": ALPHA_POINTS}),
        json!({}),
    ))
}

fn fig2f(r: &Resolved) -> Result<FigureData, CliError> {
    let s = r.sampler(4)?;
    let kind = ProtocolKind::Hindsight {
        ancilla: AncillaAxisMode::Adaptive,
    };
    let mut t = Table::new(&["theta", "fi_estimate", "fi_stderr", "fi_theory"]);
    let alphas = alpha_grid();
    let mut stream = 0u64;
    for theta in linspace(0.0, PI, 13) {
        let mut pts = Vec::with_capacity(alphas.len());
        for &a in &alphas {
            let p = rp(a, theta, 0.0)?;
            let anc = adaptive_ancilla_axis(&p);
            let probe = adaptive_probe_axis(&p, &anc);
            let d = hindsight_protocol_with_probe(&probe, &anc, &p, &r.noise)?;
            // Even-parity frequency carries the full information when the marginals vanish.
            pts.push((a, (1.0 + parity(&s.estimate(&d, stream)?)) / 2.0));
            stream += 1;
        }
        let fit = fit_fi_from_points(&pts, 0.0)?;
        let theory = protocol_fim(&kind, &rp(0.0, theta, 0.0)?, &r.noise)?.alpha_alpha();
        t.push(vec![theta.into(), fit.fi.into(), fit.fi_stderr.into(), theory.into()]);
    }
    Ok((
        t,
        json!({"theta_points": 13, "phi": 0.0, "ancilla_axis": "adaptive", "alpha_points": ALPHA_POINTS, "at_alpha": 0.0}),
        json!({}),
    ))
}

fn fig3(r: &Resolved) -> Result<FigureData, CliError> {
    let s = r.sampler(2)?;
    let mut t = Table::new(&["theta", "phi", "alpha", "p0_estimate", "p0_stderr", "p0_theory"]);
    // ẑ, x̂, ŷ in (θ, φ) order.
    let axes = [(0.0, 0.0), (FRAC_PI_2, 0.0), (FRAC_PI_2, FRAC_PI_2)];
    let lam = (4.0 * r.noise.prep_fidelity - 1.0) / 3.0;
    let mut fits = Vec::new();
    let mut stream = 0u64;
    for (theta, phi) in axes {
        let mut pts = Vec::new();
        for &a in &alpha_grid() {
            let d = agnostic_protocol(&rp(a, theta, phi)?, &r.noise)?;
            let p0 = s.estimate(&d, stream)?.probs()[0];
            stream += 1;
            let c2 = (a / 2.0).cos().powi(2);
            let theory = lam * c2 + (1.0 - lam) / 4.0;
            if a <= 0.0 {
                pts.push((a, p0));
            }
            t.push(vec![theta.into(), phi.into(), a.into(), p0.into(), s.freq_stderr(p0).into(), theory.into()]);
        }
        let fit = fit_fi_from_points(&pts, -FRAC_PI_2)?;
        fits.push(json!({"theta": theta, "phi": phi, "fi_estimate": fit.fi, "fi_stderr": fit.fi_stderr}));
    }
    let fi_theory = protocol_fim(&ProtocolKind::Agnostic, &rp(-FRAC_PI_2, 0.0, 0.0)?, &r.noise)?.alpha_alpha();
    Ok((
        t,
        json!({"axes": axes, "alpha_points": ALPHA_POINTS, "fit_window": [-PI, 0.0], "at_alpha": -FRAC_PI_2}),
        json!({"fits": fits, "fi_theory": fi_theory}),
    ))
}

fn figs1(r: &Resolved) -> Result<FigureData, CliError> {
    let s = r.sampler(2)?;
    let ens = rho_star();
    let phi = PI / 9.0;
    let mut t = Table::new(&[
        "theta",
        "phi",
        "fi_x",
        "fi_y",
        "fi_z",
        "fi_estimate",
        "fi_stderr",
        "fi_theory",
    ]);
    let alphas = alpha_grid();
    let mut stream = 0u64;
    for theta in linspace(0.0, PI, 11) {
        let n = rp(0.0, theta, phi)?.axis();
        // Tags are stored z, x, y; columns are x, y, z.
        let mut per = [(0.0, 0.0, 0.0, 0.0); 3];
        for comp in ens.components() {
            let axis = Axis::new(comp.meas_axis)?;
            let mut pts = Vec::with_capacity(alphas.len());
            for &a in &alphas {
                let rot = rp(a, theta, phi)?;
                let e = comp
                    .state
                    .evolve(&crate::rotations::axis_unitary(&rot))?
                    .expectation(&axis.observable())?;
                let d = OutcomeDistribution::new(
                    vec!["+1".into(), "-1".into()],
                    vec![(1.0 + e) / 2.0, (1.0 - e) / 2.0],
                )?;
                pts.push((a, s.estimate(&d, stream)?.probs()[0]));
                stream += 1;
            }
            let fringe = fit_fringe(&pts)?;
            let v = comp.meas_axis;
            let c = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
            let col = match comp.tag {
                1 => 0,
                2 => 1,
                _ => 2,
            };
            per[col] = (comp.weight, fringe.contrast(), fringe.contrast_stderr(), 1.0 - c * c);
        }
        let est: f64 = per.iter().map(|p| p.0 * p.1).sum();
        let err: f64 = per.iter().map(|p| (p.0 * p.2).powi(2)).sum::<f64>().sqrt();
        let theory: f64 = per.iter().map(|p| p.0 * p.3).sum();
        t.push(vec![
            theta.into(),
            phi.into(),
            per[0].1.into(),
            per[1].1.into(),
            per[2].1.into(),
            est.into(),
            err.into(),
            theory.into(),
        ]);
    }
    Ok((
        t,
        json!({"theta_points": 11, "phi": phi, "alpha_points": ALPHA_POINTS, "estimator": "fringe contrast (small-angle FI)"}),
        json!({}),
    ))
}

fn figs3(single: Option<f64>) -> Result<FigureData, CliError> {
    let fids = match single {
        Some(f) => vec![f],
        None => vec![0.25, 0.5, 0.75, 0.94, 1.0],
    };
    let mut t = Table::new(&["fidelity", "alpha", "fi"]);
    for &f in &fids {
        for k in 1..100 {
            let a = PI * k as f64 / 100.0;
            let fi = match finite_fidelity_fi(f, a) {
                Ok(v) => v,
                Err(Error::FiniteFidelityPole { .. }) => f64::NAN,
                Err(e) => return Err(e.into()),
            };
            t.push(vec![f.into(), a.into(), fi.into()]);
        }
    }
    Ok((
        t,
        json!({"fidelities": fids, "alpha": "pi k / 100, k = 1..99"}),
        json!({}),
    ))
}

/// Output path default for a figure, relative to `dir`.
pub fn default_output(id: FigureId, dir: &Path) -> PathBuf {
    dir.join(format!("{}.csv", id.name()))
}
