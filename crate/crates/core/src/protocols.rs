//! Sensing protocols as exact outcome-distribution families over [`RotationParams`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::information::{fi_from_distribution, FisherMatrix3};
use crate::numeric::{kron, pauli, tol, CMat};
use crate::rotations::{axis_unitary, RotationParams};
use crate::states::{
    bell_state, depolarize_two_qubit, depolarized_singlet, singlet, AncillaTaggedEnsemble,
    BellKind, PureState,
};

/// Negative probabilities down to this are rounding noise and clamp to zero.
const CLAMP_NEG: f64 = 1e-12;

/// Labelled probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Requires `p ≥ 0` and `Σp = 1` within 1e-10. Entries in `[−1e-12, 0)` clamp to zero.
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: probs.len(),
            });
        }
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidDistribution(format!("duplicate label `{l}`")));
            }
        }
        let mut probs = probs;
        for (l, p) in labels.iter().zip(probs.iter_mut()) {
            if !p.is_finite() || *p < -CLAMP_NEG || *p > 1.0 + CLAMP_NEG {
                return Err(Error::InvalidDistribution(format!(
                    "probability of `{l}` is {p}"
                )));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol::PROB_SUM {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        Ok(Self { labels, probs })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob_of(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probs[i])
    }
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Unit Bloch-sphere direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Axis([f64; 3]);

impl Axis {
    pub const X: Axis = Axis([1.0, 0.0, 0.0]);
    pub const Y: Axis = Axis([0.0, 1.0, 0.0]);
    pub const Z: Axis = Axis([0.0, 0.0, 1.0]);

    /// Requires unit norm within 1e-9, then renormalizes.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let n = norm3(v);
        if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("axis {v:?} has norm {n}")));
        }
        Ok(Self([v[0] / n, v[1] / n, v[2] / n]))
    }

    /// Normalizes any nonzero vector.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let n = norm3(v);
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::InvalidArgument(format!("cannot normalize {v:?}")));
        }
        Ok(Self([v[0] / n, v[1] / n, v[2] / n]))
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self(crate::rotations::axis_from_angles(theta, phi))
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    /// `m̂·σ`
    pub fn observable(&self) -> CMat {
        pauli::dot(self.0)
    }

    /// Projectors onto the `+1` and `−1` eigenspaces of `m̂·σ`.
    pub fn projectors(&self) -> (CMat, CMat) {
        let i = CMat::identity(2);
        let o = self.observable();
        ((&i + &o).scale_real(0.5), (&i - &o).scale_real(0.5))
    }
}

impl TryFrom<[f64; 3]> for Axis {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        Axis::new(v)
    }
}

impl From<Axis> for [f64; 3] {
    fn from(a: Axis) -> Self {
        a.0
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// How the hindsight protocol picks its ancilla axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaAxisMode {
    /// Chosen after the rotation axis is known: in the plane orthogonal to `n̂`.
    Adaptive,
    Fixed(Axis),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolKind {
    /// Probe prepared along `sinλ x̂ + cosλ ẑ`, measured along `obs_axis`.
    SingleQubit { lambda: f64, obs_axis: Axis },
    Hindsight { ancilla: AncillaAxisMode },
    Agnostic,
    /// The `ρ★` ensemble with per-tag measurements.
    AncillaTagged,
    BellBasis,
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::SingleQubit { .. } => "single_qubit",
            ProtocolKind::Hindsight { .. } => "hindsight",
            ProtocolKind::Agnostic => "agnostic",
            ProtocolKind::AncillaTagged => "ancilla_tagged",
            ProtocolKind::BellBasis => "bell_basis",
        }
    }
}

/// Preparation and measurement imperfections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// Singlet-preparation fidelity.
    pub prep_fidelity: f64,
    /// Entangling gates in the measurement that also depolarize (0 or 1).
    pub n_entangling_gates_meas: u8,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::IDEAL
    }
}

impl NoiseSpec {
    pub const IDEAL: NoiseSpec = NoiseSpec {
        prep_fidelity: 1.0,
        n_entangling_gates_meas: 0,
    };

    pub fn new(prep_fidelity: f64, n_entangling_gates_meas: u8) -> Result<Self> {
        let spec = Self {
            prep_fidelity,
            n_entangling_gates_meas,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.prep_fidelity) {
            return Err(Error::OutOfRange {
                name: "prep_fidelity",
                value: self.prep_fidelity,
                range: "[0, 1]",
            });
        }
        if self.n_entangling_gates_meas > 1 {
            return Err(Error::OutOfRange {
                name: "n_entangling_gates_meas",
                value: self.n_entangling_gates_meas as f64,
                range: "{0, 1}",
            });
        }
        Ok(())
    }
}

fn two_outcome_from_expectation(e: f64) -> Result<OutcomeDistribution> {
    let e = e.clamp(-1.0, 1.0);
    OutcomeDistribution::new(labels(&["+1", "-1"]), vec![(1.0 + e) / 2.0, (1.0 - e) / 2.0])
}

/// Single probe along `sinλ x̂ + cosλ ẑ`, rotated, then measured along `obs_axis`.
pub fn single_qubit_protocol(
    lambda: f64,
    obs_axis: &Axis,
    p: &RotationParams,
) -> Result<OutcomeDistribution> {
    let probe = PureState::from_bloch_angles(lambda, 0.0);
    let out = probe.evolve(&axis_unitary(p))?;
    two_outcome_from_expectation(out.expectation(&obs_axis.observable())?)
}

/// Adaptive ancilla axis: `ẑ` projected onto the plane orthogonal to `n̂`, or `x̂` when `n̂ = ±ẑ`.
pub fn adaptive_ancilla_axis(p: &RotationParams) -> Axis {
    let n = p.axis();
    let z = [0.0, 0.0, 1.0];
    let d = dot3(z, n);
    let proj = [z[0] - d * n[0], z[1] - d * n[1], z[2] - d * n[2]];
    if norm3(proj) < 1e-9 {
        return Axis::X;
    }
    Axis::normalized(proj).expect("nonzero")
}

/// Probe axis paired with an ancilla axis `â`: `â × n̂`, which is `ŷ` for axes in the xz-plane.
pub fn adaptive_probe_axis(p: &RotationParams, ancilla: &Axis) -> Axis {
    Axis::normalized(cross3(ancilla.vector(), p.axis())).unwrap_or(Axis::Y)
}

/// Singlet source with the rotation on the probe; probe along `ŷ` (or the adaptive
/// partner axis), ancilla along the requested axis. Labels: probe sign then ancilla sign.
pub fn hindsight_protocol(
    mode: &AncillaAxisMode,
    p: &RotationParams,
    noise: &NoiseSpec,
) -> Result<OutcomeDistribution> {
    let (probe_axis, ancilla_axis) = match mode {
        AncillaAxisMode::Adaptive => {
            let a = adaptive_ancilla_axis(p);
            (adaptive_probe_axis(p, &a), a)
        }
        AncillaAxisMode::Fixed(a) => (Axis::Y, *a),
    };
    hindsight_protocol_with_probe(&probe_axis, &ancilla_axis, p, noise)
}

/// Hindsight protocol with explicit probe and ancilla measurement axes.
pub fn hindsight_protocol_with_probe(
    probe_axis: &Axis,
    ancilla_axis: &Axis,
    p: &RotationParams,
    noise: &NoiseSpec,
) -> Result<OutcomeDistribution> {
    noise.validate()?;
    let rho = depolarized_singlet(noise.prep_fidelity)?;
    let u = kron(&axis_unitary(p), &CMat::identity(2))?;
    let rho = rho.evolve(&u)?;
    let (pp, pm) = probe_axis.projectors();
    let (ap, am) = ancilla_axis.projectors();
    let mut probs = Vec::with_capacity(4);
    for pr in [&pp, &pm] {
        for an in [&ap, &am] {
            probs.push(rho.expectation(&kron(pr, an)?));
        }
    }
    OutcomeDistribution::new(labels(&["++", "+-", "-+", "--"]), probs)
}

/// Two-qubit correlator `⟨(m̂·σ) ⊗ (â·σ)⟩` of the hindsight state.
pub fn hindsight_correlator(
    probe_axis: &Axis,
    ancilla_axis: &Axis,
    p: &RotationParams,
    noise: &NoiseSpec,
) -> Result<f64> {
    noise.validate()?;
    let u = kron(&axis_unitary(p), &CMat::identity(2))?;
    let rho = depolarized_singlet(noise.prep_fidelity)?.evolve(&u)?;
    Ok(rho.expectation(&kron(&probe_axis.observable(), &ancilla_axis.observable())?))
}

/// Singlet source, rotation on the probe, then a singlet-projector measurement.
/// Outcome `"0"` is the singlet ("yes"), `"1"` its complement.
pub fn agnostic_protocol(p: &RotationParams, noise: &NoiseSpec) -> Result<OutcomeDistribution> {
    noise.validate()?;
    let u = kron(&axis_unitary(p), &CMat::identity(2))?;
    let mut rho = depolarized_singlet(noise.prep_fidelity)?.evolve(&u)?;
    if noise.n_entangling_gates_meas == 1 {
        rho = depolarize_two_qubit(&rho, noise.prep_fidelity)?;
    }
    let p0 = rho.expectation(&singlet().vec().projector());
    OutcomeDistribution::new(labels(&["0", "1"]), vec![p0, 1.0 - p0])
}

/// Rotated singlet measured in the Bell basis; labels `psi+`, `psi-`, `phi+`, `phi-`.
pub fn bell_basis_protocol(p: &RotationParams) -> Result<OutcomeDistribution> {
    let u = kron(&axis_unitary(p), &CMat::identity(2))?;
    let out = singlet().evolve(&u)?;
    let kinds = [
        BellKind::PsiPlus,
        BellKind::PsiMinus,
        BellKind::PhiPlus,
        BellKind::PhiMinus,
    ];
    let probs = kinds
        .iter()
        .map(|k| bell_state(*k).overlap_sq(&out))
        .collect();
    OutcomeDistribution::new(kinds.iter().map(|k| k.label().to_string()).collect(), probs)
}

/// Per tag `j`: weight `p_j` and the distribution of measuring `U|ψ_j⟩` along its axis.
pub fn ancilla_tagged_protocol(
    ens: &AncillaTaggedEnsemble,
    p: &RotationParams,
) -> Result<Vec<(f64, OutcomeDistribution)>> {
    let u = axis_unitary(p);
    ens.components()
        .iter()
        .map(|comp| {
            let axis = Axis::new(comp.meas_axis)?;
            let e = comp.state.evolve(&u)?.expectation(&axis.observable())?;
            Ok((comp.weight, two_outcome_from_expectation(e)?))
        })
        .collect()
}

/// Joint (tag, outcome) distribution of the tagged protocol; labels `t{tag}:{outcome}`.
pub fn ancilla_tagged_joint(
    ens: &AncillaTaggedEnsemble,
    p: &RotationParams,
) -> Result<OutcomeDistribution> {
    let parts = ancilla_tagged_protocol(ens, p)?;
    let mut ls = Vec::new();
    let mut ps = Vec::new();
    for (comp, (w, d)) in ens.components().iter().zip(parts) {
        for (l, q) in d.labels().iter().zip(d.probs()) {
            ls.push(format!("t{}:{l}", comp.tag));
            ps.push(w * q);
        }
    }
    OutcomeDistribution::new(ls, ps)
}

/// `(Σ p_j I_j, [I_j])` for the `α` entry of each tag's FIM.
pub fn ancilla_tagged_fi(ens: &AncillaTaggedEnsemble, at: &RotationParams) -> Result<(f64, Vec<f64>)> {
    let mut per = Vec::new();
    let mut total = 0.0;
    for (j, comp) in ens.components().iter().enumerate() {
        let fam = |p: &RotationParams| {
            let mut parts = ancilla_tagged_protocol(ens, p)?;
            Ok(parts.swap_remove(j).1)
        };
        let fi = fi_from_distribution(fam, at)?.alpha_alpha();
        total += comp.weight * fi;
        per.push(fi);
    }
    Ok((total, per))
}

/// Outcome distribution of any protocol kind; the tagged protocol uses [`crate::states::rho_star`].
pub fn protocol_distribution(
    kind: &ProtocolKind,
    p: &RotationParams,
    noise: &NoiseSpec,
) -> Result<OutcomeDistribution> {
    match kind {
        ProtocolKind::SingleQubit { lambda, obs_axis } => single_qubit_protocol(*lambda, obs_axis, p),
        ProtocolKind::Hindsight { ancilla } => hindsight_protocol(ancilla, p, noise),
        ProtocolKind::Agnostic => agnostic_protocol(p, noise),
        ProtocolKind::AncillaTagged => ancilla_tagged_joint(&crate::states::rho_star(), p),
        ProtocolKind::BellBasis => bell_basis_protocol(p),
    }
}

/// Classical FIM of a protocol at `at`.
pub fn protocol_fim(kind: &ProtocolKind, at: &RotationParams, noise: &NoiseSpec) -> Result<FisherMatrix3> {
    fi_from_distribution(|p| protocol_distribution(kind, p, noise), at)
}
