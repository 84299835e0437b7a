//! Python bindings for `qsense_core`.

use std::fmt::Display;
use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qsense_core::cli::{self, FigureId, FigureOptions, ReadoutSpec};
use qsense_core::experiment::{self, tomography, ConfusionMatrix as CoreConfusion, MleModel, TomographyInput};
use qsense_core::information::{self, AlphaBound, FisherMatrix3};
use qsense_core::numeric::CMat;
use qsense_core::protocols::{self, AncillaAxisMode, Axis, NoiseSpec as CoreNoise, OutcomeDistribution, ProtocolKind};
use qsense_core::rotations::{self, RotationParams as CoreParams};
use qsense_core::states::{self, PureState};

fn value_err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(m: &CMat) -> Vec<Vec<Complex64>> {
    m.rows()
}

fn distribution_dict<'py>(py: Python<'py>, d: &OutcomeDistribution) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for (l, p) in d.labels().iter().zip(d.probs()) {
        out.set_item(l, p)?;
    }
    Ok(out)
}

fn distribution_from(probs: Vec<f64>) -> PyResult<OutcomeDistribution> {
    let labels = (0..probs.len()).map(|i| i.to_string()).collect();
    OutcomeDistribution::new(labels, probs).map_err(value_err)
}

fn axis(v: [f64; 3]) -> PyResult<Axis> {
    Axis::normalized(v).map_err(value_err)
}

/// Rotation angle `alpha` about the axis with polar angle `theta` and azimuth `phi`.
#[pyclass(name = "RotationParams", module = "qsense", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRotationParams {
    inner: CoreParams,
}

#[pymethods]
impl PyRotationParams {
    #[new]
    fn new(alpha: f64, theta: f64, phi: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CoreParams::with_wrapped_phi(alpha, theta, phi).map_err(value_err)?,
        })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.inner.phi
    }

    fn axis(&self) -> [f64; 3] {
        self.inner.axis()
    }

    /// `exp(-i alpha n.sigma / 2)` as nested lists of complex numbers.
    fn unitary(&self) -> Vec<Vec<Complex64>> {
        matrix(&rotations::axis_unitary(&self.inner))
    }

    /// `(theta_u, phi_u, lambda_u)`
    fn to_euler(&self) -> (f64, f64, f64) {
        let e = rotations::to_euler(&self.inner);
        (e.theta_u, e.phi_u, e.lambda_u)
    }

    /// Four `(angle, phase)` pulses; the first is applied first.
    fn pulse_sequence(&self) -> Vec<(f64, f64)> {
        rotations::pulse_sequence(&rotations::to_euler(&self.inner))
            .iter()
            .map(|p| (p.angle, p.phase))
            .collect()
    }

    /// Global-phase-insensitive distance between the pulse sequence and the target unitary.
    fn pulse_defect(&self) -> f64 {
        let seq = rotations::sequence_unitary(&rotations::pulse_sequence(&rotations::to_euler(&self.inner)));
        qsense_core::numeric::global_phase_defect(&seq, &rotations::axis_unitary(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!(
            "RotationParams(alpha={}, theta={}, phi={})",
            self.inner.alpha, self.inner.theta, self.inner.phi
        )
    }
}

#[pyclass(name = "NoiseSpec", module = "qsense", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyNoiseSpec {
    inner: CoreNoise,
}

#[pymethods]
impl PyNoiseSpec {
    #[new]
    #[pyo3(signature = (prep_fidelity=1.0, n_entangling_gates_meas=0))]
    fn new(prep_fidelity: f64, n_entangling_gates_meas: u8) -> PyResult<Self> {
        Ok(Self {
            inner: CoreNoise::new(prep_fidelity, n_entangling_gates_meas).map_err(value_err)?,
        })
    }

    #[getter]
    fn prep_fidelity(&self) -> f64 {
        self.inner.prep_fidelity
    }

    #[getter]
    fn n_entangling_gates_meas(&self) -> u8 {
        self.inner.n_entangling_gates_meas
    }

    fn __repr__(&self) -> String {
        format!(
            "NoiseSpec(prep_fidelity={}, n_entangling_gates_meas={})",
            self.inner.prep_fidelity, self.inner.n_entangling_gates_meas
        )
    }
}

fn noise_of(noise: Option<&PyNoiseSpec>) -> CoreNoise {
    noise.map(|n| n.inner).unwrap_or(CoreNoise::IDEAL)
}

/// A sensing protocol. Build one with the static constructors.
#[pyclass(name = "Protocol", module = "qsense", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyProtocol {
    inner: ProtocolKind,
}

#[pymethods]
impl PyProtocol {
    #[staticmethod]
    #[pyo3(signature = (lam=0.0, obs_axis=[0.0, 1.0, 0.0]))]
    fn single_qubit(lam: f64, obs_axis: [f64; 3]) -> PyResult<Self> {
        Ok(Self {
            inner: ProtocolKind::SingleQubit {
                lambda: lam,
                obs_axis: axis(obs_axis)?,
            },
        })
    }

    /// `ancilla=None` picks the ancilla axis adaptively.
    #[staticmethod]
    #[pyo3(signature = (ancilla=None))]
    fn hindsight(ancilla: Option<[f64; 3]>) -> PyResult<Self> {
        let mode = match ancilla {
            Some(v) => AncillaAxisMode::Fixed(axis(v)?),
            None => AncillaAxisMode::Adaptive,
        };
        Ok(Self {
            inner: ProtocolKind::Hindsight { ancilla: mode },
        })
    }

    #[staticmethod]
    fn agnostic() -> Self {
        Self {
            inner: ProtocolKind::Agnostic,
        }
    }

    #[staticmethod]
    fn ancilla_tagged() -> Self {
        Self {
            inner: ProtocolKind::AncillaTagged,
        }
    }

    #[staticmethod]
    fn bell_basis() -> Self {
        Self {
            inner: ProtocolKind::BellBasis,
        }
    }

    /// Same JSON form as the `protocol` field of a sweep config.
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self {
            inner: serde_json::from_str(s).map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("plain data")
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    /// Outcome probabilities keyed by label.
    #[pyo3(signature = (params, noise=None))]
    fn distribution<'py>(
        &self,
        py: Python<'py>,
        params: &PyRotationParams,
        noise: Option<&PyNoiseSpec>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let d = protocols::protocol_distribution(&self.inner, &params.inner, &noise_of(noise)).map_err(value_err)?;
        distribution_dict(py, &d)
    }

    /// Classical Fisher matrix in `(alpha, theta, phi)` order.
    #[pyo3(signature = (params, noise=None))]
    fn fim(&self, params: &PyRotationParams, noise: Option<&PyNoiseSpec>) -> PyResult<[[f64; 3]; 3]> {
        Ok(protocols::protocol_fim(&self.inner, &params.inner, &noise_of(noise))
            .map_err(value_err)?
            .entries())
    }

    #[pyo3(signature = (params, noise=None))]
    fn fi(&self, params: &PyRotationParams, noise: Option<&PyNoiseSpec>) -> PyResult<f64> {
        Ok(self.fim(params, noise)?[0][0])
    }

    fn __repr__(&self) -> String {
        format!("Protocol({})", self.to_json())
    }
}

/// Row-stochastic readout matrix, `rows[true][observed]`.
#[pyclass(name = "ConfusionMatrix", module = "qsense", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConfusionMatrix {
    inner: CoreConfusion,
}

#[pymethods]
impl PyConfusionMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: CoreConfusion::new(rows).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn symmetric(fidelity: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CoreConfusion::symmetric(fidelity).map_err(value_err)?,
        })
    }

    /// Probe 0.978, ancilla 0.989, probe index first.
    #[staticmethod]
    fn default_two_qubit() -> Self {
        Self {
            inner: CoreConfusion::default_two_qubit(),
        }
    }

    /// Kronecker product, `self` on the first index.
    fn product(&self, other: &PyConfusionMatrix) -> Self {
        Self {
            inner: CoreConfusion::product(&self.inner, &other.inner),
        }
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Observed distribution for true probabilities `probs`.
    fn apply(&self, probs: Vec<f64>) -> PyResult<Vec<f64>> {
        let d = experiment::apply_readout_noise(&distribution_from(probs)?, &self.inner).map_err(value_err)?;
        Ok(d.probs().to_vec())
    }

    /// Iterative Bayesian unfolding from a uniform prior.
    #[pyo3(signature = (observed, max_iters=1000))]
    fn unfold(&self, observed: Vec<f64>, max_iters: usize) -> PyResult<Vec<f64>> {
        let d = experiment::bayesian_unfold(&distribution_from(observed)?, &self.inner, max_iters).map_err(value_err)?;
        Ok(d.probs().to_vec())
    }
}

fn rotation(alpha: f64, theta: f64, phi: f64) -> PyResult<CoreParams> {
    CoreParams::with_wrapped_phi(alpha, theta, phi).map_err(value_err)
}

/// Shot counts keyed by label, drawn from ChaCha20 with `seed`.
#[pyfunction]
fn sample_shots<'py>(py: Python<'py>, probs: &Bound<'py, PyDict>, shots: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let mut labels = Vec::new();
    let mut ps = Vec::new();
    for (k, v) in probs.iter() {
        labels.push(k.str()?.to_string());
        ps.push(v.extract::<f64>()?);
    }
    let d = OutcomeDistribution::new(labels, ps).map_err(value_err)?;
    let t = experiment::sample_shots(&d, shots, seed).map_err(value_err)?;
    let out = PyDict::new(py);
    for (l, n) in t.labels.iter().zip(&t.counts) {
        out.set_item(l, n)?;
    }
    Ok(out)
}

/// Closed-form FI of the agnostic protocol with a depolarized singlet of fidelity `f`.
#[pyfunction]
fn finite_fidelity_fi(f: f64, alpha: f64) -> PyResult<f64> {
    information::finite_fidelity_fi(f, alpha).map_err(value_err)
}

/// SLD quantum Fisher matrix of `state` ("zero", "rho_star" or "singlet") in `(alpha, theta, phi)` order.
#[pyfunction]
#[pyo3(signature = (state, alpha, theta, phi, fidelity=1.0))]
fn state_qfim(state: &str, alpha: f64, theta: f64, phi: f64, fidelity: f64) -> PyResult<[[f64; 3]; 3]> {
    let s = match state.replace('-', "_").as_str() {
        "zero" => cli::StateArg::Zero,
        "rho_star" => cli::StateArg::RhoStar,
        "singlet" => cli::StateArg::Singlet,
        other => return Err(value_err(format!("unknown state `{other}`"))),
    };
    Ok(cli::state_qfim(s, &rotation(alpha, theta, phi)?, fidelity)
        .map_err(value_err)?
        .entries())
}

/// `1 / (I_aa - I_a,n I_nn^-1 I_n,a)`, or `None` when alpha is not identifiable.
#[pyfunction]
fn schur_alpha_bound(m: [[f64; 3]; 3]) -> PyResult<Option<f64>> {
    let m = FisherMatrix3::new(m).map_err(value_err)?;
    Ok(match information::schur_alpha_bound(&m) {
        AlphaBound::Bound(v) => Some(v),
        AlphaBound::NonIdentifiable(_) => None,
    })
}

/// QFI for alpha averaged over rotation axes, for the pure probe at Bloch angles `(theta, phi)`.
#[pyfunction]
fn sphere_average_qfi(theta: f64, phi: f64, alpha: f64) -> PyResult<f64> {
    information::sphere_average_qfi(&PureState::from_bloch_angles(theta, phi), alpha).map_err(value_err)
}

/// Total and per-tag FI of the tagged ensemble with its fixed measurements.
#[pyfunction]
fn ancilla_tagged_fi(alpha: f64, theta: f64, phi: f64) -> PyResult<(f64, Vec<f64>)> {
    protocols::ancilla_tagged_fi(&states::rho_star(), &rotation(alpha, theta, phi)?).map_err(value_err)
}

/// Fits `a + b1 cos(alpha) + b2 sin(alpha)` and returns the FI at `at_alpha` with its standard error.
#[pyfunction]
fn fit_fi(alphas: Vec<f64>, probs: Vec<f64>, at_alpha: f64) -> PyResult<(f64, f64)> {
    if alphas.len() != probs.len() {
        return Err(value_err("alphas and probs differ in length"));
    }
    let pts: Vec<_> = alphas.into_iter().zip(probs).collect();
    let f = experiment::fit_fi_from_points(&pts, at_alpha).map_err(value_err)?;
    Ok((f.fi, f.fi_stderr))
}

/// Monte Carlo study of the maximum-likelihood estimator; returns the summary as a dict.
#[pyfunction]
#[pyo3(signature = (protocol, theta, phi, alpha, shots, replicas, seed, noise=None))]
#[allow(clippy::too_many_arguments)]
fn monte_carlo_mle<'py>(
    py: Python<'py>,
    protocol: &PyProtocol,
    theta: f64,
    phi: f64,
    alpha: f64,
    shots: u64,
    replicas: usize,
    seed: u64,
    noise: Option<&PyNoiseSpec>,
) -> PyResult<Bound<'py, PyDict>> {
    let model = MleModel::new(protocol.inner, noise_of(noise), theta, phi);
    let s = py
        .detach(|| experiment::monte_carlo_mle(&model, alpha, shots, replicas, seed))
        .map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item("mean", s.mean)?;
    out.set_item("variance", s.variance)?;
    out.set_item("n_var", s.n_var)?;
    out.set_item("n_var_stderr", s.n_var_stderr)?;
    out.set_item("boundary_hits", s.boundary_hits)?;
    out.set_item("estimates", s.estimates)?;
    Ok(out)
}

/// The 15 two-qubit Pauli expectations of a depolarized singlet, in `pauli_labels()` order.
#[pyfunction]
fn depolarized_singlet_paulis(f: f64) -> PyResult<Vec<f64>> {
    Ok(tomography::pauli_expectations(&states::depolarized_singlet(f).map_err(value_err)?).to_vec())
}

#[pyfunction]
fn pauli_labels() -> Vec<String> {
    tomography::pauli_labels()
}

/// Linear-inversion tomography from 15 Pauli expectations (or the 9 correlators).
/// Returns `rho`, its fidelity to the singlet and the fit residual.
#[pyfunction]
fn tomography_two_qubit<'py>(py: Python<'py>, expectations: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let input = match expectations.len() {
        9 => TomographyInput::Correlators(expectations),
        _ => TomographyInput::Paulis(expectations),
    };
    let r = experiment::tomography_two_qubit(&input).map_err(value_err)?;
    let f = states::fidelity(&r.rho, &states::singlet().density()).map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item("rho", matrix(r.rho.mat()))?;
    out.set_item("singlet_fidelity", f)?;
    out.set_item("fit_residual", r.fit_residual)?;
    out.set_item("expectation_table", r.expectation_table.to_vec())?;
    Ok(out)
}

/// Writes one figure's CSV and JSON sidecar; returns the CSV path.
#[pyfunction]
#[pyo3(signature = (figure, out=None, shots=None, seed=None, fidelity=None, readout=None))]
fn run_figure(
    py: Python<'_>,
    figure: &str,
    out: Option<PathBuf>,
    shots: Option<u64>,
    seed: Option<u64>,
    fidelity: Option<f64>,
    readout: Option<String>,
) -> PyResult<String> {
    let id: FigureId = figure.parse().map_err(value_err)?;
    let opts = FigureOptions {
        shots,
        seed,
        fidelity,
        readout: readout.map(ReadoutSpec::Named),
        out,
        base: None,
    };
    let art = py.detach(|| cli::run_figure(id, &opts)).map_err(value_err)?;
    Ok(art.csv.display().to_string())
}

#[pymodule]
fn qsense(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyRotationParams>()?;
    m.add_class::<PyNoiseSpec>()?;
    m.add_class::<PyProtocol>()?;
    m.add_class::<PyConfusionMatrix>()?;
    m.add_function(wrap_pyfunction!(sample_shots, m)?)?;
    m.add_function(wrap_pyfunction!(finite_fidelity_fi, m)?)?;
    m.add_function(wrap_pyfunction!(state_qfim, m)?)?;
    m.add_function(wrap_pyfunction!(schur_alpha_bound, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_average_qfi, m)?)?;
    m.add_function(wrap_pyfunction!(ancilla_tagged_fi, m)?)?;
    m.add_function(wrap_pyfunction!(fit_fi, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_mle, m)?)?;
    m.add_function(wrap_pyfunction!(depolarized_singlet_paulis, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_labels, m)?)?;
    m.add_function(wrap_pyfunction!(tomography_two_qubit, m)?)?;
    m.add_function(wrap_pyfunction!(run_figure, m)?)?;
    Ok(())
}
