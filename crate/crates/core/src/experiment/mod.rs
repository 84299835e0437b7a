//! Simulated experiment: shots, readout error, unfolding, tomography, fitting, estimation.

pub mod fit;
pub mod mle;
pub mod readout;
pub mod sampling;
pub mod tomography;

pub use fit::{fit_fi_from_points, fit_fi_from_sweep, fit_fringe, Fringe, SweepFit};
pub use mle::{mle_estimate_alpha, monte_carlo_mle, EstimatorResult, MleModel, MonteCarloSummary};
pub use readout::{apply_readout_noise, bayesian_unfold, bayesian_unfold_counts, ConfusionMatrix};
pub use sampling::{exact_counts, replica_rng, sample_shots, sample_shots_with_rng, ShotTable};
pub use tomography::{tomography_two_qubit, TomographyInput, TomographyResult};
