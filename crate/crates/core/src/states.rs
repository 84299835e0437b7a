//! State constructors, Bloch maps, and the Uhlmann fidelity.
//!
//! Two-qubit states use the ordering |00⟩, |01⟩, |10⟩, |11⟩ with the probe as
//! the first tensor factor.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{c, hermitian_eig, kron, matrix_sqrt_psd, pauli, tol, CMat, CVec, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vec: CVec,
}

impl PureState {
    pub fn new(vec: CVec) -> Result<Self> {
        let norm = vec.norm();
        if (norm - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { vec })
    }

    /// Normalizes first; fails only on the zero vector.
    pub fn normalized(vec: CVec) -> Result<Self> {
        let norm = vec.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            vec: vec.normalized(),
        })
    }

    /// Single-qubit state with Bloch vector `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn from_bloch_angles(theta: f64, phi: f64) -> Self {
        let v = CVec::new(vec![
            c((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), phi),
        ])
        .expect("dim 2");
        Self { vec: v }
    }

    /// Single-qubit state pointing along a unit Bloch vector.
    pub fn from_bloch_vector(v: [f64; 3]) -> Result<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if (r - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(r));
        }
        let theta = v[2].clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        Ok(Self::from_bloch_angles(theta, phi))
    }

    pub fn vec(&self) -> &CVec {
        &self.vec
    }

    pub fn dim(&self) -> usize {
        self.vec.dim()
    }

    pub fn density(&self) -> DensityMx {
        DensityMx {
            mat: self.vec.projector(),
        }
    }

    pub fn evolve(&self, u: &CMat) -> Result<PureState> {
        Ok(Self {
            vec: u.apply(&self.vec)?,
        })
    }

    /// `|⟨self|other⟩|²`
    pub fn overlap_sq(&self, other: &PureState) -> f64 {
        self.vec.inner(&other.vec).norm_sqr()
    }

    /// `⟨ψ|O|ψ⟩` (real part).
    pub fn expectation(&self, op: &CMat) -> Result<f64> {
        Ok(self.vec.inner(&op.apply(&self.vec)?).re)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMx {
    mat: CMat,
}

impl DensityMx {
    /// Checks Hermiticity, unit trace, and positivity.
    pub fn new(mat: CMat) -> Result<Self> {
        mat.ensure_hermitian()?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
            return Err(Error::BadTrace(tr.re));
        }
        let eig = hermitian_eig(&mat)?;
        if eig.values[0] < -tol::DENSITY_EIG {
            return Err(Error::NotPsd(eig.values[0]));
        }
        Ok(Self { mat })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: CMat::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// `U ρ U†`
    pub fn evolve(&self, u: &CMat) -> Result<DensityMx> {
        Ok(Self {
            mat: self.mat.conjugate_by(u)?,
        })
    }

    /// `tr(ρ O)` for Hermitian `O`.
    pub fn expectation(&self, op: &CMat) -> f64 {
        self.mat.trace_product_re(op)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.mat).expect("validated Hermitian").values
    }

    pub fn purity(&self) -> f64 {
        self.mat.trace_product_re(&self.mat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
        }
    }
}

pub fn bell_state(k: BellKind) -> PureState {
    let s = FRAC_1_SQRT_2;
    let amps = match k {
        BellKind::PhiPlus => [s, 0.0, 0.0, s],
        BellKind::PhiMinus => [s, 0.0, 0.0, -s],
        BellKind::PsiPlus => [0.0, s, s, 0.0],
        BellKind::PsiMinus => [0.0, s, -s, 0.0],
    };
    PureState {
        vec: CVec::from_real(&amps).expect("dim 4"),
    }
}

pub fn singlet() -> PureState {
    bell_state(BellKind::PsiMinus)
}

/// `(tr ρX, tr ρY, tr ρZ)` of a qubit state.
pub fn bloch_vector(rho: &DensityMx) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.dim(),
        });
    }
    Ok([
        rho.expectation(&pauli::x()),
        rho.expectation(&pauli::y()),
        rho.expectation(&pauli::z()),
    ])
}

/// `(I + r·σ)/2`; requires `|r| ≤ 1 + 1e-9`.
pub fn density_from_bloch(r: [f64; 3]) -> Result<DensityMx> {
    let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if norm > 1.0 + 1e-9 {
        return Err(Error::OutOfRange {
            name: "bloch_norm",
            value: norm,
            range: "[0, 1]",
        });
    }
    Ok(DensityMx {
        mat: (&CMat::identity(2) + &pauli::dot(r)).scale_real(0.5),
    })
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMx, sigma: &DensityMx) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    // A rank-one argument reduces to ⟨ψ|σ|ψ⟩, which avoids square roots of rounding-level eigenvalues.
    for (a, b) in [(rho, sigma), (sigma, rho)] {
        let eig = hermitian_eig(&a.mat)?;
        if *eig.values.last().unwrap() >= 1.0 - 1e-12 {
            let psi = eig.vectors.last().unwrap();
            return Ok(psi.inner(&b.mat.apply(psi)?).re);
        }
    }
    let sr = matrix_sqrt_psd(&rho.mat)?;
    let inner = &(&sr * &sigma.mat) * &sr;
    // Re-Hermitize against rounding before the second decomposition.
    let inner = (&inner + &inner.adjoint()).scale_real(0.5);
    let eig = hermitian_eig(&inner)?;
    let tr: f64 = eig.values.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(tr * tr)
}

fn check_fidelity_param(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::OutOfRange {
            name: "fidelity",
            value: f,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `F|Ψ⁻⟩⟨Ψ⁻| + (1−F)/3 (I − |Ψ⁻⟩⟨Ψ⁻|)`.
pub fn depolarized_singlet(f: f64) -> Result<DensityMx> {
    check_fidelity_param(f)?;
    let p = singlet().vec.projector();
    let rest = &CMat::identity(4) - &p;
    DensityMx::new(&p.scale_real(f) + &rest.scale_real((1.0 - f) / 3.0))
}

/// Two-qubit depolarizing map `λρ + (1−λ) I/4` with `λ = (4F−1)/3`.
///
/// Sends the singlet to [`depolarized_singlet`]`(F)`.
pub fn depolarize_two_qubit(rho: &DensityMx, f: f64) -> Result<DensityMx> {
    check_fidelity_param(f)?;
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let lam = (4.0 * f - 1.0) / 3.0;
    let mat = &rho.mat.scale_real(lam) + &CMat::identity(4).scale_real((1.0 - lam) / 4.0);
    Ok(DensityMx { mat })
}

fn partial_trace(rho: &CMat, da: usize, db: usize, keep_first: bool) -> CMat {
    let keep = if keep_first { da } else { db };
    let mut out = CMat::zeros(keep);
    for i in 0..keep {
        for j in 0..keep {
            let mut acc = C64::new(0.0, 0.0);
            if keep_first {
                for k in 0..db {
                    acc += rho[(i * db + k, j * db + k)];
                }
            } else {
                for k in 0..da {
                    acc += rho[(k * db + i, k * db + j)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Reduced state of the probe (first qubit).
pub fn reduce_to_probe(rho: &DensityMx) -> Result<DensityMx> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    Ok(DensityMx {
        mat: partial_trace(&rho.mat, 2, 2, true),
    })
}

/// Reduced state of the ancilla (second qubit).
pub fn reduce_to_ancilla(rho: &DensityMx) -> Result<DensityMx> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    Ok(DensityMx {
        mat: partial_trace(&rho.mat, 2, 2, false),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggedComponent {
    pub weight: f64,
    pub state: PureState,
    pub tag: usize,
    /// Unit Bloch axis measured on the probe when this tag is read out.
    pub meas_axis: [f64; 3],
}

/// Probe states labelled by orthogonal classical ancilla states `|j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaTaggedEnsemble {
    components: Vec<TaggedComponent>,
}

/// Largest number of tags whose joint state fits in [`crate::numeric::MAX_DIM`].
pub const MAX_TAGS: usize = 4;

impl AncillaTaggedEnsemble {
    pub fn new(components: Vec<TaggedComponent>) -> Result<Self> {
        if components.is_empty() || components.len() > MAX_TAGS {
            return Err(Error::InvalidArgument(format!(
                "ensemble needs 1..={MAX_TAGS} components, got {}",
                components.len()
            )));
        }
        let mut total = 0.0;
        for (i, comp) in components.iter().enumerate() {
            if !(comp.weight >= 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "negative weight {} on component {i}",
                    comp.weight
                )));
            }
            if comp.state.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: comp.state.dim(),
                });
            }
            let a = comp.meas_axis;
            let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
            if (n - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "measurement axis of component {i} has norm {n}"
                )));
            }
            if components[..i].iter().any(|o| o.tag == comp.tag) {
                return Err(Error::InvalidArgument(format!("duplicate tag {}", comp.tag)));
            }
            total += comp.weight;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[TaggedComponent] {
        &self.components
    }

    /// `Σ_j p_j |ψ_j⟩⟨ψ_j|`
    pub fn probe_state(&self) -> DensityMx {
        let mut m = CMat::zeros(2);
        for comp in &self.components {
            m = &m + &comp.state.vec.projector().scale_real(comp.weight);
        }
        DensityMx { mat: m }
    }

    /// `Σ_j p_j (U|ψ_j⟩⟨ψ_j|U†) ⊗ |j⟩⟨j|`, tags mapped to ancilla levels in list order.
    pub fn joint_state(&self, u: &CMat) -> Result<DensityMx> {
        let k = self.components.len();
        let mut m = CMat::zeros(2 * k);
        for (idx, comp) in self.components.iter().enumerate() {
            let evolved = comp.state.evolve(u)?.vec.projector();
            let tag = CVec::basis(k, idx).projector();
            m = &m + &kron(&evolved, &tag)?.scale_real(comp.weight);
        }
        Ok(DensityMx { mat: m })
    }
}

/// Equal mixture of `|z+⟩, |x+⟩, |y+⟩` tagged 0, 1, 2, each measured along its own axis.
pub fn rho_star() -> AncillaTaggedEnsemble {
    let s = FRAC_1_SQRT_2;
    let states = [
        (CVec::from_real(&[1.0, 0.0]).unwrap(), [0.0, 0.0, 1.0]),
        (CVec::from_real(&[s, s]).unwrap(), [1.0, 0.0, 0.0]),
        (CVec::new(vec![c(s, 0.0), c(0.0, s)]).unwrap(), [0.0, 1.0, 0.0]),
    ];
    let components = states
        .into_iter()
        .enumerate()
        .map(|(tag, (v, axis))| TaggedComponent {
            weight: 1.0 / 3.0,
            state: PureState { vec: v },
            tag,
            meas_axis: axis,
        })
        .collect();
    AncillaTaggedEnsemble::new(components).expect("valid by construction")
}
