//! Classical and quantum Fisher information over the parameters `(α, θ, φ)`.
//!
//! All derivatives are central finite differences with step [`tol::FD_STEP`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{hermitian_eig, tol, CMat, CVec, C64};
use crate::protocols::OutcomeDistribution;
use crate::rotations::{axis_unitary, RotationParams};
use crate::states::{AncillaTaggedEnsemble, DensityMx, PureState};

/// Probabilities below this are treated as zero by [`fi_from_distribution`].
pub const FI_ZERO_PROB: f64 = 1e-12;
/// A zero-probability outcome may carry at most this derivative.
pub const FI_ZERO_DERIV: f64 = 1e-9;
/// SLD entries are dropped where `λ_m + λ_n` falls below this.
pub const SLD_SUPPORT: f64 = 1e-10;

/// Real symmetric PSD 3×3 matrix over `(α, θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMatrix3 {
    entries: [[f64; 3]; 3],
}

fn real_sym_eigenvalues(m: &[[f64; 3]; 3]) -> Vec<f64> {
    let cm = CMat::from_real_rows(m).expect("3x3");
    hermitian_eig(&cm).expect("symmetric").values
}

impl FisherMatrix3 {
    /// Checks symmetry within 1e-9 and a PSD floor of −1e-8; the stored matrix is symmetrized.
    pub fn new(entries: [[f64; 3]; 3]) -> Result<Self> {
        let mut out = entries;
        for i in 0..3 {
            for j in 0..3 {
                let (a, b) = (entries[i][j], entries[j][i]);
                if !a.is_finite() {
                    return Err(Error::InvalidFisherMatrix(format!("entry ({i},{j}) = {a}")));
                }
                if (a - b).abs() > 1e-9 {
                    return Err(Error::InvalidFisherMatrix(format!(
                        "asymmetric: ({i},{j}) = {a}, ({j},{i}) = {b}"
                    )));
                }
                out[i][j] = 0.5 * (a + b);
            }
        }
        let min = real_sym_eigenvalues(&out)[0];
        if min < -1e-8 {
            return Err(Error::InvalidFisherMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { entries: out })
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn entries(&self) -> [[f64; 3]; 3] {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    /// The `(α, α)` entry.
    pub fn alpha_alpha(&self) -> f64 {
        self.entries[0][0]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.entries;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        real_sym_eigenvalues(&self.entries)
    }

    pub fn max_abs_diff(&self, other: &FisherMatrix3) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        worst
    }

    /// `Σ w_j M_j`
    pub fn weighted_sum(parts: &[(f64, FisherMatrix3)]) -> Result<Self> {
        let mut acc = [[0.0; 3]; 3];
        for (w, m) in parts {
            for i in 0..3 {
                for j in 0..3 {
                    acc[i][j] += w * m.entries[i][j];
                }
            }
        }
        Self::new(acc)
    }

    /// Inverse, if the smallest eigenvalue exceeds `1e-10`.
    pub fn inverse(&self) -> Option<[[f64; 3]; 3]> {
        if self.eigenvalues()[0] <= 1e-10 {
            return None;
        }
        let m = &self.entries;
        let det = self.determinant();
        let mut inv = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
            }
        }
        Some(inv)
    }
}

/// PSD weight matrix for scalar cost `tr(W I⁻¹)`; the default isolates `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightMatrix {
    entries: [[f64; 3]; 3],
}

impl Default for WeightMatrix {
    fn default() -> Self {
        Self {
            entries: [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
        }
    }
}

impl WeightMatrix {
    pub fn new(entries: [[f64; 3]; 3]) -> Result<Self> {
        let fm = FisherMatrix3::new(entries)?;
        Ok(Self {
            entries: fm.entries,
        })
    }

    pub fn entries(&self) -> [[f64; 3]; 3] {
        self.entries
    }

    /// `tr(W I⁻¹)`, or `None` when `I` is singular.
    pub fn cost(&self, m: &FisherMatrix3) -> Option<f64> {
        let inv = m.inverse()?;
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += self.entries[i][j] * inv[j][i];
            }
        }
        Some(acc)
    }
}

/// Symmetric logarithmic derivatives `Λ_α, Λ_θ, Λ_φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SLDTriple {
    pub lambda_alpha: CMat,
    pub lambda_theta: CMat,
    pub lambda_phi: CMat,
}

impl SLDTriple {
    pub fn get(&self, i: usize) -> &CMat {
        match i {
            0 => &self.lambda_alpha,
            1 => &self.lambda_theta,
            2 => &self.lambda_phi,
            _ => panic!("parameter index {i} out of range"),
        }
    }
}

fn check_probabilities(d: &OutcomeDistribution, at: &RotationParams) -> Result<()> {
    let sum: f64 = d.probs().iter().sum();
    if (sum - 1.0).abs() > tol::PROB_SUM || d.probs().iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidDistribution(format!(
            "family output at {at:?} sums to {sum}"
        )));
    }
    Ok(())
}

/// Classical FIM `Σ_k ∂_i p_k ∂_j p_k / p_k`.
pub fn fi_from_distribution<F>(family: F, at: &RotationParams) -> Result<FisherMatrix3>
where
    F: Fn(&RotationParams) -> Result<OutcomeDistribution>,
{
    let h = tol::FD_STEP;
    let center = family(at)?;
    check_probabilities(&center, at)?;
    let mut derivs = Vec::with_capacity(3);
    for i in 0..3 {
        let plus = family(&at.shifted(i, h))?;
        let minus = family(&at.shifted(i, -h))?;
        if plus.labels() != center.labels() || minus.labels() != center.labels() {
            return Err(Error::InvalidDistribution(
                "family changes its outcome labels across the stencil".into(),
            ));
        }
        let d: Vec<f64> = plus
            .probs()
            .iter()
            .zip(minus.probs())
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        derivs.push(d);
    }

    let mut m = [[0.0; 3]; 3];
    for (k, &p) in center.probs().iter().enumerate() {
        if p < FI_ZERO_PROB {
            if let Some(i) = (0..3).find(|&i| derivs[i][k].abs() >= FI_ZERO_DERIV) {
                return Err(Error::FiDivergence {
                    outcome: center.labels()[k].clone(),
                    prob: p,
                    deriv: derivs[i][k],
                });
            }
            continue;
        }
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += derivs[i][k] * derivs[j][k] / p;
            }
        }
    }
    FisherMatrix3::new(m)
}

fn pure_derivative<F>(family: &F, at: &RotationParams, i: usize) -> Result<CVec>
where
    F: Fn(&RotationParams) -> Result<PureState>,
{
    let h = tol::FD_STEP;
    let plus = family(&at.shifted(i, h))?;
    let minus = family(&at.shifted(i, -h))?;
    Ok(plus.vec().sub(minus.vec()).scale(C64::new(0.5 / h, 0.0)))
}

/// Pure-state QFI in `α`: `4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²)`.
pub fn qfi_pure<F>(family: F, at: &RotationParams) -> Result<f64>
where
    F: Fn(&RotationParams) -> Result<PureState>,
{
    let psi = family(at)?;
    let d = pure_derivative(&family, at, 0)?;
    let q = 4.0 * (d.inner(&d).re - psi.vec().inner(&d).norm_sqr());
    if q < -1e-8 {
        return Err(Error::InvalidFisherMatrix(format!("negative QFI {q:e}")));
    }
    Ok(q.max(0.0))
}

/// Full pure-state QFIM `4 Re(⟨∂_iψ|∂_jψ⟩ − ⟨∂_iψ|ψ⟩⟨ψ|∂_jψ⟩)`.
pub fn qfim_pure<F>(family: F, at: &RotationParams) -> Result<FisherMatrix3>
where
    F: Fn(&RotationParams) -> Result<PureState>,
{
    let psi = family(at)?;
    let ds = [
        pure_derivative(&family, at, 0)?,
        pure_derivative(&family, at, 1)?,
        pure_derivative(&family, at, 2)?,
    ];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let z = ds[i].inner(&ds[j]) - ds[i].inner(psi.vec()) * psi.vec().inner(&ds[j]);
            m[i][j] = 4.0 * z.re;
        }
    }
    FisherMatrix3::new(m)
}

/// QFIM from symmetric logarithmic derivatives built in the eigenbasis of `ρ`.
pub fn qfim_sld<F>(family: F, at: &RotationParams) -> Result<(FisherMatrix3, SLDTriple)>
where
    F: Fn(&RotationParams) -> Result<DensityMx>,
{
    let h = tol::FD_STEP;
    let rho = family(at)?;
    let n = rho.dim();
    let eig = hermitian_eig(rho.mat())?;
    let mut v = CMat::zeros(n);
    for (k, vec) in eig.vectors.iter().enumerate() {
        for i in 0..n {
            v[(i, k)] = vec[i];
        }
    }
    let vd = v.adjoint();

    let mut drho = Vec::with_capacity(3);
    let mut slds = Vec::with_capacity(3);
    for i in 0..3 {
        let plus = family(&at.shifted(i, h))?;
        let minus = family(&at.shifted(i, -h))?;
        if plus.dim() != n || minus.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: plus.dim().max(minus.dim()),
            });
        }
        let d = (plus.mat() - minus.mat()).scale_real(0.5 / h);
        let d_eig = &(&vd * &d) * &v;
        let mut lam = CMat::zeros(n);
        for a in 0..n {
            for b in 0..n {
                let s = eig.values[a] + eig.values[b];
                if s >= SLD_SUPPORT {
                    lam[(a, b)] = d_eig[(a, b)] * (2.0 / s);
                }
            }
        }
        slds.push(&(&v * &lam) * &vd);
        drho.push(d);
    }

    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] =
                0.5 * (slds[i].trace_product_re(&drho[j]) + slds[j].trace_product_re(&drho[i]));
        }
    }
    let fm = FisherMatrix3::new(m)?;
    let mut it = slds.into_iter();
    let triple = SLDTriple {
        lambda_alpha: it.next().unwrap(),
        lambda_theta: it.next().unwrap(),
        lambda_phi: it.next().unwrap(),
    };
    Ok((fm, triple))
}

/// Precision attainable for `α` alone: `(I⁻¹)_αα`, or a reason it is unavailable.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaBound {
    Bound(f64),
    NonIdentifiable(String),
}

impl AlphaBound {
    pub fn value(&self) -> Option<f64> {
        match self {
            AlphaBound::Bound(v) => Some(*v),
            AlphaBound::NonIdentifiable(_) => None,
        }
    }
}

/// Schur complements below this (relative to `max(1, I_αα)`) count as singular.
pub const SCHUR_SINGULAR: f64 = 1e-8;

/// `1/(I_αα − cᵀ N⁻¹ c)` with `N` the axis block and `c` the coupling column.
pub fn schur_alpha_bound(m: &FisherMatrix3) -> AlphaBound {
    let e = m.entries();
    let (n11, n12, n22) = (e[1][1], e[1][2], e[2][2]);
    let cpl = [e[0][1], e[0][2]];
    let i_aa = e[0][0];
    let half_tr = 0.5 * (n11 + n22);
    let min_eig = half_tr - (0.25 * (n11 - n22) * (n11 - n22) + n12 * n12).sqrt();

    if min_eig > 1e-10 {
        let det = n11 * n22 - n12 * n12;
        let quad = (cpl[0] * cpl[0] * n22 - 2.0 * cpl[0] * cpl[1] * n12 + cpl[1] * cpl[1] * n11) / det;
        let schur = i_aa - quad;
        if schur <= SCHUR_SINGULAR * i_aa.max(1.0) {
            return AlphaBound::NonIdentifiable(format!(
                "Schur complement {schur:e} vanishes; the matrix is singular"
            ));
        }
        return AlphaBound::Bound(1.0 / schur);
    }
    if cpl[0].abs() <= 1e-9 && cpl[1].abs() <= 1e-9 {
        if i_aa <= 1e-12 {
            return AlphaBound::NonIdentifiable(format!("I_alpha_alpha = {i_aa:e}"));
        }
        return AlphaBound::Bound(1.0 / i_aa);
    }
    AlphaBound::NonIdentifiable(format!(
        "axis block is singular (min eigenvalue {min_eig:e}) but couples to alpha"
    ))
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp;
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub const SPHERE_NODES_COS_THETA: usize = 32;
pub const SPHERE_NODES_PHI: usize = 64;

/// Sphere average of the rotation QFI of a qubit probe, `(1/4π)∫ I_α dΩ`.
pub fn sphere_average_qfi(input: &PureState, alpha: f64) -> Result<f64> {
    sphere_average_qfi_with_nodes(input, alpha, SPHERE_NODES_COS_THETA, SPHERE_NODES_PHI)
}

pub fn sphere_average_qfi_with_nodes(
    input: &PureState,
    alpha: f64,
    n_cos: usize,
    n_phi: usize,
) -> Result<f64> {
    if input.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: input.dim(),
        });
    }
    let (xs, ws) = gauss_legendre(n_cos);
    let dphi = 2.0 * PI / n_phi as f64;
    let family = |p: &RotationParams| input.evolve(&axis_unitary(p));
    let mut total = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        let theta = x.clamp(-1.0, 1.0).acos();
        let mut ring = 0.0;
        for k in 0..n_phi {
            let p = RotationParams::new(alpha, theta, k as f64 * dphi)?;
            ring += qfi_pure(family, &p)?;
        }
        total += w * ring * dphi;
    }
    Ok(total / (4.0 * PI))
}

/// Agnostic-protocol FI for singlet-preparation fidelity `f`:
/// `−(1−4F)² sin²α / ([−5+2F+(4F−1)cosα][1+2F+(4F−1)cosα])`.
pub fn finite_fidelity_fi(f: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::OutOfRange {
            name: "fidelity",
            value: f,
            range: "[0, 1]",
        });
    }
    let k = 4.0 * f - 1.0;
    let ca = alpha.cos();
    let denominator = (-5.0 + 2.0 * f + k * ca) * (1.0 + 2.0 * f + k * ca);
    if denominator.abs() <= 1e-12 {
        return Err(Error::FiniteFidelityPole {
            fidelity: f,
            alpha,
            denominator,
        });
    }
    let s = alpha.sin();
    Ok(-(1.0 - 4.0 * f).powi(2) * s * s / denominator)
}

/// QFIM of the tagged joint state `Σ_j p_j U|ψ_j⟩⟨ψ_j|U† ⊗ |j⟩⟨j|`.
pub fn qfim_tagged_ensemble(ens: &AncillaTaggedEnsemble, at: &RotationParams) -> Result<FisherMatrix3> {
    let (m, _) = qfim_sld(|p| ens.joint_state(&axis_unitary(p)), at)?;
    Ok(m)
}

/// `Σ_j p_j I(U|ψ_j⟩)`, the convexity bound that tagging saturates.
pub fn qfim_tagged_components(
    ens: &AncillaTaggedEnsemble,
    at: &RotationParams,
) -> Result<FisherMatrix3> {
    let mut parts = Vec::new();
    for comp in ens.components() {
        let m = qfim_pure(|p| comp.state.evolve(&axis_unitary(p)), at)?;
        parts.push((comp.weight, m));
    }
    FisherMatrix3::weighted_sum(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::kron;
    use crate::states::{rho_star, singlet};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn two_outcome(p0: f64) -> Result<OutcomeDistribution> {
        OutcomeDistribution::new(vec!["0".into(), "1".into()], vec![p0, 1.0 - p0])
    }

    fn zero_probe(p: &RotationParams) -> Result<PureState> {
        PureState::new(CVec::basis(2, 0))?.evolve(&axis_unitary(p))
    }

    #[test]
    fn fi_examples() {
        for a in [0.3, 1.0, 2.0, 3.0] {
            let at = RotationParams::new(a, 1.0, 1.0).unwrap();
            let m = fi_from_distribution(|p| two_outcome((p.alpha / 2.0).cos().powi(2)), &at).unwrap();
            assert!((m.alpha_alpha() - 1.0).abs() < 1e-8);
        }
        let at = RotationParams::new(0.4, 1.0, 1.0).unwrap();
        let m = fi_from_distribution(|_| two_outcome(0.5), &at).unwrap();
        assert_eq!(m.entries(), [[0.0; 3]; 3]);
    }

    #[test]
    fn fi_divergence_is_reported() {
        let at = RotationParams::new(0.0, 1.0, 1.0).unwrap();
        // p_1 = max(α, 0)/2 vanishes at α = 0 with a nonzero central difference.
        let err = fi_from_distribution(
            |p| two_outcome(1.0 - 0.5 * p.alpha.max(0.0)),
            &at,
        )
        .unwrap_err();
        match err {
            Error::FiDivergence { outcome, .. } => assert_eq!(outcome, "1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn qfi_pure_examples() {
        let q = qfi_pure(zero_probe, &RotationParams::new(0.7, FRAC_PI_2, 0.3).unwrap()).unwrap();
        assert!((q - 1.0).abs() < 1e-6);
        let q = qfi_pure(zero_probe, &RotationParams::new(0.7, 0.0, 0.0).unwrap()).unwrap();
        assert!(q.abs() < 1e-6);
        let s = singlet();
        for (t, f) in [(0.0, 0.0), (1.0, 2.0), (2.5, 5.0)] {
            let fam = |p: &RotationParams| {
                let u = kron(&axis_unitary(p), &CMat::identity(2))?;
                s.evolve(&u)
            };
            let q = qfi_pure(fam, &RotationParams::new(1.3, t, f).unwrap()).unwrap();
            assert!((q - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn sld_matches_pure_qfi_and_satisfies_definition() {
        let at = RotationParams::new(0.9, 1.1, 0.4).unwrap();
        let (m, sld) = qfim_sld(|p| Ok(zero_probe(p)?.density()), &at).unwrap();
        let q = qfi_pure(zero_probe, &at).unwrap();
        assert!((m.alpha_alpha() - q).abs() < 1e-5);
        assert!(m.determinant().abs() < 1e-8);
        let full = qfim_pure(zero_probe, &at).unwrap();
        assert!(m.max_abs_diff(&full) < 1e-5);
        for i in 0..3 {
            assert!(sld.get(i).hermiticity_defect() < 1e-9);
        }
    }

    #[test]
    fn sld_solves_lyapunov_on_full_rank_state() {
        // ∂ρ = (Λρ + ρΛ)/2 holds exactly when ρ has full support.
        let fam = |p: &RotationParams| {
            let u = kron(&axis_unitary(p), &CMat::identity(2))?;
            crate::states::depolarized_singlet(0.8)?.evolve(&u)
        };
        let at = RotationParams::new(0.6, 0.8, 2.0).unwrap();
        let (_, sld) = qfim_sld(fam, &at).unwrap();
        let rho = fam(&at).unwrap();
        let h = tol::FD_STEP;
        let d = (fam(&at.shifted(0, h)).unwrap().mat() - fam(&at.shifted(0, -h)).unwrap().mat())
            .scale_real(0.5 / h);
        let l = &sld.lambda_alpha;
        let rhs = (&(l * rho.mat()) + &(rho.mat() * l)).scale_real(0.5);
        assert!(rhs.max_abs_diff(&d) < 1e-8);
    }

    #[test]
    fn schur_examples() {
        let c38 = |a: f64, t: f64| {
            let s = (a / 2.0).sin().powi(2);
            FisherMatrix3::diag(2.0 / 3.0, 8.0 / 3.0 * t.sin().powi(2) * s, 8.0 / 3.0 * s).unwrap()
        };
        assert_eq!(schur_alpha_bound(&c38(1.0, 1.0)).value().map(|v| (v - 1.5).abs() < 1e-12), Some(true));
        // α = 0: axis rows vanish, α stays estimable.
        assert_eq!(schur_alpha_bound(&c38(0.0, 1.0)).value().map(|v| (v - 1.5).abs() < 1e-12), Some(true));
        let m = FisherMatrix3::diag(1.0, 2.0, 3.0).unwrap();
        assert_eq!(schur_alpha_bound(&m), AlphaBound::Bound(1.0));
        let m = FisherMatrix3::diag(0.0, 0.0, 0.0).unwrap();
        assert!(schur_alpha_bound(&m).value().is_none());
        // Rank one: singular overall.
        let v = [1.0, 0.5, -0.3];
        let mut e = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                e[i][j] = v[i] * v[j];
            }
        }
        assert!(schur_alpha_bound(&FisherMatrix3::new(e).unwrap()).value().is_none());
    }

    #[test]
    fn weight_matrix_default_is_schur_bound() {
        let m = FisherMatrix3::new([[2.0, 0.3, 0.1], [0.3, 1.5, 0.2], [0.1, 0.2, 1.0]]).unwrap();
        let w = WeightMatrix::default();
        let b = schur_alpha_bound(&m).value().unwrap();
        assert!((w.cost(&m).unwrap() - b).abs() < 1e-12);
        let inv = m.inverse().unwrap();
        let e = m.entries();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    acc += e[i][k] * inv[k][j];
                }
                assert!((acc - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(32);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in 0..40 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - want).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn sphere_average_examples() {
        let zero = PureState::new(CVec::basis(2, 0)).unwrap();
        assert!((sphere_average_qfi(&zero, 0.8).unwrap() - 2.0 / 3.0).abs() < 1e-4);
        let xp = PureState::from_bloch_angles(FRAC_PI_2, 0.0);
        assert!((sphere_average_qfi(&xp, -2.0).unwrap() - 2.0 / 3.0).abs() < 1e-4);
        let fine = sphere_average_qfi_with_nodes(&xp, -2.0, 64, 128).unwrap();
        assert!((fine - sphere_average_qfi(&xp, -2.0).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn finite_fidelity_examples() {
        for a in [0.1, 1.0, 2.0, 3.0] {
            assert!((finite_fidelity_fi(1.0, a).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(finite_fidelity_fi(0.25, a).unwrap(), 0.0);
        }
        assert!((finite_fidelity_fi(0.94, FRAC_PI_2).unwrap() - 0.84779).abs() < 1e-4);
        assert!(matches!(
            finite_fidelity_fi(1.0, 0.0),
            Err(Error::FiniteFidelityPole { .. })
        ));
        assert!(finite_fidelity_fi(1.5, 1.0).is_err());
    }

    #[test]
    fn tagged_convexity_saturates() {
        let ens = rho_star();
        for (a, t, f) in [(0.5, 0.7, 1.0), (2.0, 2.0, 4.0), (-1.2, 1.4, 0.2)] {
            let at = RotationParams::new(a, t, f).unwrap();
            let joint = qfim_tagged_ensemble(&ens, &at).unwrap();
            let sum = qfim_tagged_components(&ens, &at).unwrap();
            assert!(joint.max_abs_diff(&sum) < 1e-5);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn schur_inequality(v in prop::collection::vec(-1.0f64..1.0, 9)) {
            let mut e = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    e[i][j] = (0..3).map(|k| v[3 * i + k] * v[3 * j + k]).sum::<f64>();
                }
                e[i][i] += 0.05;
            }
            let m = FisherMatrix3::new(e).unwrap();
            let b = schur_alpha_bound(&m).value().unwrap();
            prop_assert!(b >= 1.0 / m.alpha_alpha() - 1e-9);
        }

        #[test]
        fn sphere_average_is_two_thirds(t in 0.0..PI, f in 0.0..2.0 * PI, a in -PI..PI) {
            let s = PureState::from_bloch_angles(t, f);
            prop_assert!((sphere_average_qfi_with_nodes(&s, a, 16, 32).unwrap() - 2.0 / 3.0).abs() < 1e-4);
        }
    }
}
