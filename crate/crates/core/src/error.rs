use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("matrix is not Hermitian: defect {defect:e} exceeds tolerance {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: most negative eigenvalue {0:e}")]
    NotPsd(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("state is not normalized: norm {0}")]
    NotNormalized(f64),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("Fisher information diverges at outcome `{outcome}`: probability {prob:e} with derivative {deriv:e}")]
    FiDivergence {
        outcome: String,
        prob: f64,
        deriv: f64,
    },

    #[error("Fisher matrix invariant violated: {0}")]
    InvalidFisherMatrix(String),

    #[error("pole in finite-fidelity FI at f = {fidelity}, alpha = {alpha}: denominator {denominator:e}")]
    FiniteFidelityPole {
        fidelity: f64,
        alpha: f64,
        denominator: f64,
    },

    #[error("eigendecomposition did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("observed distribution is identically zero")]
    ZeroObserved,

    #[error("tomography input: {0}")]
    Tomography(String),

    #[error("sweep fit failed (residual {residual:e}): {reason}")]
    FitFailed { reason: String, residual: f64 },

    #[error("likelihood is flat over the search range (spread {spread:e})")]
    FlatLikelihood { spread: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
