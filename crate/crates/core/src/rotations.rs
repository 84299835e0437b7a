//! The unknown rotation `U = exp(−iα n̂·σ/2)`, its generator eigenbasis, and
//! the Euler-angle / four-pulse decomposition used to implement it.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{c, hermitian_eig, pauli, CMat, CVec, C64};

/// Threshold on `|π − |α||` that switches [`to_euler`] to the half-turn branch.
pub const HALF_TURN_TOL: f64 = 1e-12;

/// Parameter triple `(α, θ, φ)`: rotation angle and polar/azimuthal axis angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationParams {
    pub alpha: f64,
    pub theta: f64,
    pub phi: f64,
}

impl RotationParams {
    /// `α ∈ [−π, π]`, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn new(alpha: f64, theta: f64, phi: f64) -> Result<Self> {
        if !alpha.is_finite() || !(-PI..=PI).contains(&alpha) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "[-pi, pi]",
            });
        }
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                range: "[0, pi]",
            });
        }
        if !phi.is_finite() || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                range: "[0, 2pi)",
            });
        }
        Ok(Self { alpha, theta, phi })
    }

    /// Like [`RotationParams::new`] but wraps `φ` into `[0, 2π)` first.
    pub fn with_wrapped_phi(alpha: f64, theta: f64, phi: f64) -> Result<Self> {
        Self::new(alpha, theta, phi.rem_euclid(2.0 * PI))
    }

    /// Parameter vector in `(α, θ, φ)` order.
    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.theta, self.phi]
    }

    /// Copy with parameter `index` (0 = α, 1 = θ, 2 = φ) moved by `delta`.
    ///
    /// Used for finite differences: the result may leave the nominal ranges by
    /// `delta` (θ, α), which every formula in the crate tolerates; φ is wrapped.
    pub fn shifted(&self, index: usize, delta: f64) -> Self {
        let mut out = *self;
        match index {
            0 => out.alpha += delta,
            1 => out.theta += delta,
            2 => out.phi = (out.phi + delta).rem_euclid(2.0 * PI),
            _ => panic!("parameter index {index} out of range"),
        }
        out
    }

    /// Unit rotation axis `n̂`.
    pub fn axis(&self) -> [f64; 3] {
        axis_from_angles(self.theta, self.phi)
    }
}

pub fn axis_from_angles(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// `exp(−iα n̂·σ/2) = cos(α/2) I − i sin(α/2) n̂·σ`.
pub fn axis_unitary(p: &RotationParams) -> CMat {
    let (s, co) = (p.alpha / 2.0).sin_cos();
    let n = p.axis();
    let ns = pauli::dot(n);
    &CMat::identity(2).scale_real(co) + &ns.scale(c(0.0, -s))
}

/// `A = −n̂·σ/2`.
pub fn generator(theta: f64, phi: f64) -> CMat {
    pauli::dot(axis_from_angles(theta, phi)).scale_real(-0.5)
}

/// Eigenvectors `(a₊, a₋)` of `A = −n̂·σ/2` with eigenvalues `+½` and `−½`.
///
/// With these, `U = e^{iα/2}|a₊⟩⟨a₊| + e^{−iα/2}|a₋⟩⟨a₋|`.
pub fn generator_eigenbasis(theta: f64, phi: f64) -> (CVec, CVec) {
    let eig = hermitian_eig(&generator(theta, phi)).expect("generator is Hermitian");
    let a_minus = eig.vectors[0].clone();
    let a_plus = eig.vectors[1].clone();
    (a_plus, a_minus)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub theta_u: f64,
    pub phi_u: f64,
    pub lambda_u: f64,
}

impl EulerAngles {
    pub fn new(theta_u: f64, phi_u: f64, lambda_u: f64) -> Result<Self> {
        for (name, v) in [("theta_u", theta_u), ("phi_u", phi_u), ("lambda_u", lambda_u)] {
            if !v.is_finite() {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "finite",
                });
            }
        }
        Ok(Self {
            theta_u,
            phi_u,
            lambda_u,
        })
    }
}

fn sign_or_zero(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Euler angles of `U(α, θ, φ)` in the `from_euler` parameterization.
pub fn to_euler(p: &RotationParams) -> EulerAngles {
    let RotationParams { alpha, theta, phi } = *p;
    if (PI - alpha.abs()).abs() < HALF_TURN_TOL {
        let sg = sign_or_zero(PI - 2.0 * theta);
        return EulerAngles {
            theta_u: PI - (PI - 2.0 * theta).abs(),
            phi_u: sg * FRAC_PI_2 + phi - FRAC_PI_2,
            lambda_u: sg * FRAC_PI_2 - phi + FRAC_PI_2,
        };
    }
    let half = alpha / 2.0;
    let arc = (half.tan() * theta.cos()).atan();
    EulerAngles {
        theta_u: 2.0 * (half.sin() * theta.sin()).asin(),
        phi_u: arc + phi - FRAC_PI_2,
        lambda_u: arc - phi + FRAC_PI_2,
    }
}

/// `[[cos(θ/2), −e^{iλ} sin(θ/2)], [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]]`.
pub fn from_euler(e: &EulerAngles) -> CMat {
    let (s, co) = (e.theta_u / 2.0).sin_cos();
    CMat::from_rows(&[
        [c(co, 0.0), -C64::from_polar(s, e.lambda_u)],
        [
            C64::from_polar(s, e.phi_u),
            C64::from_polar(co, e.phi_u + e.lambda_u),
        ],
    ])
    .expect("2x2")
}

/// One resonant pulse `R(angle, phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub angle: f64,
    pub phase: f64,
}

impl PulseSpec {
    /// Restricted to the calibrated angles `π/2` and `π`.
    pub fn new(angle: f64, phase: f64) -> Result<Self> {
        let calibrated = [FRAC_PI_2, PI]
            .iter()
            .any(|a| (angle - a).abs() < 1e-12);
        if !calibrated || !phase.is_finite() {
            return Err(Error::OutOfRange {
                name: "angle",
                value: angle,
                range: "{pi/2, pi}",
            });
        }
        Ok(Self { angle, phase })
    }

    /// Any finite angle.
    pub fn general(angle: f64, phase: f64) -> Result<Self> {
        if !angle.is_finite() || !phase.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite pulse ({angle}, {phase})"
            )));
        }
        Ok(Self { angle, phase })
    }
}

/// `R(α, φ) = [[cos(α/2), −i e^{−iφ} sin(α/2)], [−i e^{iφ} sin(α/2), cos(α/2)]]`.
pub fn r_pulse(s: &PulseSpec) -> CMat {
    let (sn, co) = (s.angle / 2.0).sin_cos();
    let mi = c(0.0, -1.0);
    CMat::from_rows(&[
        [c(co, 0.0), mi * C64::from_polar(sn, -s.phase)],
        [mi * C64::from_polar(sn, s.phase), c(co, 0.0)],
    ])
    .expect("2x2")
}

/// Four pulses in application order; their product equals `from_euler(e)` up to a global phase.
pub fn pulse_sequence(e: &EulerAngles) -> [PulseSpec; 4] {
    let EulerAngles {
        theta_u,
        phi_u,
        lambda_u,
    } = *e;
    [
        PulseSpec {
            angle: PI,
            phase: 0.0,
        },
        PulseSpec {
            angle: PI,
            phase: (theta_u + phi_u + lambda_u) / 2.0,
        },
        PulseSpec {
            angle: FRAC_PI_2,
            phase: theta_u + phi_u,
        },
        PulseSpec {
            angle: FRAC_PI_2,
            phase: phi_u - PI,
        },
    ]
}

/// Matrix product of a pulse list given in application order (first pulse rightmost).
pub fn sequence_unitary(pulses: &[PulseSpec]) -> CMat {
    pulses
        .iter()
        .fold(CMat::identity(2), |acc, p| &r_pulse(p) * &acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{equal_up_to_global_phase, expm_generator, global_phase_defect};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn oracle(p: &RotationParams) -> CMat {
        expm_generator(&pauli::dot(p.axis()).scale_real(0.5), p.alpha).unwrap()
    }

    #[test]
    fn params_validate() {
        assert!(RotationParams::new(PI, PI, 0.0).is_ok());
        assert!(matches!(
            RotationParams::new(3.5, 0.0, 0.0),
            Err(Error::OutOfRange { name: "alpha", .. })
        ));
        assert!(matches!(
            RotationParams::new(0.0, -0.1, 0.0),
            Err(Error::OutOfRange { name: "theta", .. })
        ));
        assert!(matches!(
            RotationParams::new(0.0, 0.0, 2.0 * PI),
            Err(Error::OutOfRange { name: "phi", .. })
        ));
        let p = RotationParams::with_wrapped_phi(0.0, 0.0, -0.5).unwrap();
        assert!((p.phi - (2.0 * PI - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn axis_unitary_examples() {
        let id = axis_unitary(&RotationParams::new(0.0, 1.1, 2.2).unwrap());
        assert!(id.max_abs_diff(&CMat::identity(2)) < 1e-15);
        let u = axis_unitary(&RotationParams::new(PI, FRAC_PI_2, 0.0).unwrap());
        assert!(u.max_abs_diff(&pauli::x().scale(c(0.0, -1.0))) < 1e-15);
        let p = RotationParams::new(FRAC_PI_2, PI / 4.0, PI / 3.0).unwrap();
        let u = axis_unitary(&p);
        assert!(u.max_abs_diff(&oracle(&p)) < 1e-12);
        let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
        assert!((det - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn eigenbasis_examples() {
        let (ap, am) = generator_eigenbasis(0.0, 0.0);
        assert!(ap.max_abs_diff(&CVec::basis(2, 1)) < 1e-15);
        assert!(am.max_abs_diff(&CVec::basis(2, 0)) < 1e-15);
        let (ap, am) = generator_eigenbasis(FRAC_PI_2, 0.0);
        let s = FRAC_1_SQRT_2;
        let plus_want = CVec::from_real(&[-s, s]).unwrap().canonical_phase();
        assert!(ap.max_abs_diff(&plus_want) < 1e-12);
        assert!(am.max_abs_diff(&CVec::from_real(&[s, s]).unwrap()) < 1e-12);
    }

    #[test]
    fn euler_examples() {
        let e = to_euler(&RotationParams::new(FRAC_PI_2, FRAC_PI_2, 0.0).unwrap());
        assert!((e.theta_u - FRAC_PI_2).abs() < 1e-12);
        assert!((e.phi_u + FRAC_PI_2).abs() < 1e-12);
        assert!((e.lambda_u - FRAC_PI_2).abs() < 1e-12);

        let e = to_euler(&RotationParams::new(0.0, 1.0, 1.0).unwrap());
        assert_eq!(e.theta_u, 0.0);

        let e = to_euler(&RotationParams::new(PI, PI / 4.0, 0.0).unwrap());
        assert!((e.theta_u - FRAC_PI_2).abs() < 1e-12);
        assert!(e.phi_u.abs() < 1e-12);
        assert!((e.lambda_u - PI).abs() < 1e-12);

        assert!(from_euler(&EulerAngles::new(0.0, 0.0, 0.0).unwrap())
            .max_abs_diff(&CMat::identity(2))
            < 1e-15);
        let m = from_euler(&EulerAngles::new(PI, 0.0, 0.0).unwrap());
        let want = CMat::from_real_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert!(m.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn pulse_examples() {
        assert!(r_pulse(&PulseSpec::new(PI, 0.0).unwrap())
            .max_abs_diff(&pauli::x().scale(c(0.0, -1.0)))
            < 1e-15);
        assert!(r_pulse(&PulseSpec::general(0.0, 0.4).unwrap())
            .max_abs_diff(&CMat::identity(2))
            < 1e-15);
        let s = FRAC_1_SQRT_2;
        let want = CMat::from_real_rows(&[[s, -s], [s, s]]).unwrap();
        assert!(r_pulse(&PulseSpec::new(FRAC_PI_2, FRAC_PI_2).unwrap()).max_abs_diff(&want) < 1e-15);
        assert!(PulseSpec::new(1.0, 0.0).is_err());

        let seq = pulse_sequence(&EulerAngles::new(0.0, 0.0, 0.0).unwrap());
        assert!(equal_up_to_global_phase(&sequence_unitary(&seq), &CMat::identity(2)));

        let a = 0.83;
        let rz = &r_pulse(&PulseSpec::general(PI, a / 2.0).unwrap())
            * &r_pulse(&PulseSpec::general(PI, 0.0).unwrap());
        let want = CMat::diag(&[C64::from_polar(1.0, -a / 2.0), C64::from_polar(1.0, a / 2.0)])
            .unwrap();
        assert!(equal_up_to_global_phase(&rz, &want));
    }

    fn arb_params() -> impl Strategy<Value = RotationParams> {
        (-PI..=PI, 0.0..=PI, 0.0..2.0 * PI)
            .prop_map(|(a, t, p)| RotationParams::new(a, t, p).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn unitary_matches_expm(p in arb_params()) {
            prop_assert!(axis_unitary(&p).max_abs_diff(&oracle(&p)) <= 1e-12);
        }

        #[test]
        fn spectral_decomposition(p in arb_params()) {
            let (ap, am) = generator_eigenbasis(p.theta, p.phi);
            let a = generator(p.theta, p.phi);
            prop_assert!(a.apply(&ap).unwrap().max_abs_diff(&ap.scale(c(0.5, 0.0))) <= 1e-10);
            prop_assert!(a.apply(&am).unwrap().max_abs_diff(&am.scale(c(-0.5, 0.0))) <= 1e-10);
            prop_assert!(ap.inner(&am).norm() <= 1e-12);
            let u = &ap.projector().scale(C64::from_polar(1.0, p.alpha / 2.0))
                + &am.projector().scale(C64::from_polar(1.0, -p.alpha / 2.0));
            prop_assert!(u.max_abs_diff(&axis_unitary(&p)) <= 1e-10);
        }

        #[test]
        fn euler_round_trip(p in arb_params()) {
            let e = to_euler(&p);
            let u = axis_unitary(&p);
            prop_assert!(global_phase_defect(&from_euler(&e), &u) <= 1e-9);
            prop_assert!(global_phase_defect(&sequence_unitary(&pulse_sequence(&e)), &u) <= 1e-9);
        }

        #[test]
        fn pulse_sequence_matches_from_euler(t in -7.0f64..7.0, f in -7.0f64..7.0, l in -7.0f64..7.0) {
            let e = EulerAngles::new(t, f, l).unwrap();
            prop_assert!(global_phase_defect(&sequence_unitary(&pulse_sequence(&e)), &from_euler(&e)) <= 1e-9);
        }
    }

    #[test]
    fn half_turn_boundary_cases() {
        for &alpha in &[PI, -PI] {
            for k in 0..=16 {
                let theta = PI * k as f64 / 16.0;
                for &phi in &[0.0, 1.0, 4.0] {
                    let p = RotationParams::new(alpha, theta, phi).unwrap();
                    let e = to_euler(&p);
                    let v = sequence_unitary(&pulse_sequence(&e));
                    assert!(global_phase_defect(&v, &axis_unitary(&p)) <= 1e-9, "{p:?}");
                }
            }
        }
    }
}
