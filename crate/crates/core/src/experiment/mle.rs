//! Maximum-likelihood estimation of `α` from shot tables, and Monte Carlo replicas.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{protocol_distribution, NoiseSpec, OutcomeDistribution, ProtocolKind};
use crate::rotations::RotationParams;

use super::sampling::{replica_rng, sample_shots_with_rng, ShotTable};

pub const GRID_POINTS: usize = 256;
pub const GOLDEN_TOL: f64 = 1e-8;
/// Distance from a range end below which a maximum is flagged as a boundary maximum.
pub const BOUNDARY_FLAG: f64 = 1e-6;

/// Protocol, noise, and the known rotation axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleModel {
    pub kind: ProtocolKind,
    pub noise: NoiseSpec,
    pub theta: f64,
    pub phi: f64,
    /// Overrides the default search range.
    #[serde(default)]
    pub search_range: Option<(f64, f64)>,
}

impl MleModel {
    pub fn new(kind: ProtocolKind, noise: NoiseSpec, theta: f64, phi: f64) -> Self {
        Self {
            kind,
            noise,
            theta,
            phi,
            search_range: None,
        }
    }

    /// Search range for `α̂`. Distributions even in `α` (agnostic, Bell basis) use `[0, π]`,
    /// the rest `[−π, π]`. Sinusoidal fringes also confuse `α` with `π − α` there; pass a
    /// narrower `search_range` when that matters.
    pub fn alpha_range(&self) -> (f64, f64) {
        if let Some(r) = self.search_range {
            return r;
        }
        match self.kind {
            ProtocolKind::Agnostic | ProtocolKind::BellBasis => (0.0, PI),
            _ => (-PI, PI),
        }
    }

    pub fn distribution(&self, alpha: f64) -> Result<OutcomeDistribution> {
        let p = RotationParams::new(alpha.clamp(-PI, PI), self.theta, self.phi)?;
        protocol_distribution(&self.kind, &p, &self.noise)
    }

    fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        let (lo, hi) = self.alpha_range();
        if !(lo < hi && lo >= -PI && hi <= PI) {
            return Err(Error::InvalidArgument(format!(
                "search range [{lo}, {hi}] must be a non-empty part of [-pi, pi]"
            )));
        }
        RotationParams::new(0.0, self.theta, self.phi)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub alpha_hat: f64,
    pub n_shots: u64,
    pub protocol: ProtocolKind,
    pub log_likelihood: f64,
    /// The maximum sits on an end of the search range.
    pub at_boundary: bool,
}

fn log_likelihood(counts: &[u64], probs: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&n, &p) in counts.iter().zip(probs) {
        if n == 0 {
            continue;
        }
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += n as f64 * p.ln();
    }
    acc
}

/// Grid of `(α, probabilities)` shared by every table estimated under one model.
struct Grid {
    labels: Vec<String>,
    points: Vec<(f64, Vec<f64>)>,
}

impl Grid {
    fn new(model: &MleModel) -> Result<Self> {
        model.validate()?;
        let (lo, hi) = model.alpha_range();
        let mut labels = Vec::new();
        let mut points = Vec::with_capacity(GRID_POINTS);
        for i in 0..GRID_POINTS {
            let a = lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64;
            let d = model.distribution(a)?;
            if i == 0 {
                labels = d.labels().to_vec();
            }
            points.push((a, d.probs().to_vec()));
        }
        Ok(Self { labels, points })
    }
}

fn estimate_on_grid(shots: &ShotTable, model: &MleModel, grid: &Grid) -> Result<EstimatorResult> {
    shots.validate()?;
    if shots.labels != grid.labels {
        return Err(Error::InvalidArgument(format!(
            "shot labels {:?} do not match the model outcomes {:?}",
            shots.labels, grid.labels
        )));
    }
    if shots.n_total == 0 {
        return Err(Error::ZeroObserved);
    }
    let lls: Vec<f64> = grid
        .points
        .iter()
        .map(|(_, p)| log_likelihood(&shots.counts, p))
        .collect();
    let (best, &best_ll) = lls
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let worst = lls.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = best_ll - worst;
    if !best_ll.is_finite() || spread <= 1e-9 * best_ll.abs().max(1.0) {
        return Err(Error::FlatLikelihood { spread });
    }

    let (lo, hi) = model.alpha_range();
    let mut a = grid.points[best.saturating_sub(1)].0;
    let mut b = grid.points[(best + 1).min(GRID_POINTS - 1)].0;
    let f = |x: f64| -> Result<f64> {
        Ok(log_likelihood(&shots.counts, model.distribution(x)?.probs()))
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let mut alpha_hat = 0.5 * (a + b);
    let mut ll = f(alpha_hat)?;
    // Keep the grid point if refinement wandered onto a lower value (e.g. at a range end).
    if best_ll > ll {
        alpha_hat = grid.points[best].0;
        ll = best_ll;
    }
    let at_boundary = (alpha_hat - lo).abs() < BOUNDARY_FLAG || (hi - alpha_hat).abs() < BOUNDARY_FLAG;
    Ok(EstimatorResult {
        alpha_hat,
        n_shots: shots.n_total,
        protocol: model.kind,
        log_likelihood: ll,
        at_boundary,
    })
}

/// Grid scan over the model's range followed by golden-section refinement.
pub fn mle_estimate_alpha(shots: &ShotTable, model: &MleModel) -> Result<EstimatorResult> {
    let grid = Grid::new(model)?;
    estimate_on_grid(shots, model, &grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub true_alpha: f64,
    pub n_shots: u64,
    pub replicas: usize,
    pub seed: u64,
    /// In replica order.
    pub estimates: Vec<f64>,
    pub boundary_hits: usize,
    pub mean: f64,
    /// Unbiased sample variance of `α̂`.
    pub variance: f64,
    /// `N · var(α̂)`
    pub n_var: f64,
    /// Monte Carlo standard error of `n_var`, `n_var·√(2/(R−1))`.
    pub n_var_stderr: f64,
}

/// Independent replicas: replica `r` samples from stream `r` of `seed`. Aggregation is in replica order.
pub fn monte_carlo_mle(
    model: &MleModel,
    true_alpha: f64,
    n_shots: u64,
    replicas: usize,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if replicas < 2 {
        return Err(Error::InvalidArgument("need at least 2 replicas".into()));
    }
    let truth = model.distribution(true_alpha)?;
    let grid = Grid::new(model)?;
    let results: Vec<Result<EstimatorResult>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r as u64);
            let t = sample_shots_with_rng(&truth, n_shots, &mut rng)?;
            estimate_on_grid(&t, model, &grid)
        })
        .collect();
    let mut estimates = Vec::with_capacity(replicas);
    let mut boundary_hits = 0;
    for r in results {
        let r = r?;
        boundary_hits += r.at_boundary as usize;
        estimates.push(r.alpha_hat);
    }
    let rf = replicas as f64;
    let mean = estimates.iter().sum::<f64>() / rf;
    let variance = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (rf - 1.0);
    let n_var = n_shots as f64 * variance;
    Ok(MonteCarloSummary {
        true_alpha,
        n_shots,
        replicas,
        seed,
        estimates,
        boundary_hits,
        mean,
        variance,
        n_var,
        n_var_stderr: n_var * (2.0 / (rf - 1.0)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::sampling::{exact_counts, sample_shots};
    use crate::protocols::{AncillaAxisMode, Axis};
    use std::f64::consts::FRAC_PI_2;

    fn agnostic() -> MleModel {
        MleModel::new(ProtocolKind::Agnostic, NoiseSpec::IDEAL, 0.7, 1.3)
    }

    #[test]
    fn exact_counts_recover_alpha() {
        let m = agnostic();
        let t = exact_counts(&m.distribution(0.7).unwrap(), 10_000_000).unwrap();
        let r = mle_estimate_alpha(&t, &m).unwrap();
        assert!((r.alpha_hat - 0.7).abs() < 1e-3);
        assert!(!r.at_boundary);
        assert_eq!(r.n_shots, 10_000_000);
    }

    #[test]
    fn flat_likelihood_is_reported() {
        let kind = ProtocolKind::SingleQubit {
            lambda: 0.0,
            obs_axis: Axis::Y,
        };
        let m = MleModel::new(kind, NoiseSpec::IDEAL, 0.0, 0.0);
        let t = sample_shots(&m.distribution(0.5).unwrap(), 1000, 1).unwrap();
        assert!(matches!(mle_estimate_alpha(&t, &m), Err(Error::FlatLikelihood { .. })));
    }

    #[test]
    fn boundary_maximum_is_flagged() {
        let m = agnostic();
        let t = ShotTable::new(vec!["0".into(), "1".into()], vec![100, 0], None).unwrap();
        let r = mle_estimate_alpha(&t, &m).unwrap();
        assert!(r.at_boundary);
        assert!(r.alpha_hat.abs() < 1e-6);
    }

    #[test]
    fn signed_alpha_for_single_qubit() {
        let kind = ProtocolKind::SingleQubit {
            lambda: 0.0,
            obs_axis: Axis::Y,
        };
        let m = MleModel::new(kind, NoiseSpec::IDEAL, FRAC_PI_2, 0.0);
        // ⟨Y⟩ = −sin α: distinguishes ±α, leaves α ↔ π − α.
        let t = exact_counts(&m.distribution(-0.4).unwrap(), 10_000_000).unwrap();
        let r = mle_estimate_alpha(&t, &m).unwrap();
        assert!((r.alpha_hat + 0.4).abs() < 1e-3 || (r.alpha_hat + PI - 0.4).abs() < 1e-3);
    }

    #[test]
    fn bad_search_range_rejected() {
        let mut m = agnostic();
        m.search_range = Some((1.0, 0.5));
        let t = ShotTable::new(vec!["0".into(), "1".into()], vec![1, 1], None).unwrap();
        assert!(matches!(mle_estimate_alpha(&t, &m), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn label_mismatch_rejected() {
        let m = agnostic();
        let t = ShotTable::new(vec!["a".into(), "b".into()], vec![1, 1], None).unwrap();
        assert!(matches!(mle_estimate_alpha(&t, &m), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn monte_carlo_is_deterministic_and_respects_crb() {
        let mut m = MleModel::new(
            ProtocolKind::Hindsight {
                ancilla: AncillaAxisMode::Adaptive,
            },
            NoiseSpec::IDEAL,
            1.0,
            0.0,
        );
        m.search_range = Some((-FRAC_PI_2, FRAC_PI_2));
        let a = monte_carlo_mle(&m, 0.5, 2000, 200, 42).unwrap();
        let b = monte_carlo_mle(&m, 0.5, 2000, 200, 42).unwrap();
        assert_eq!(a, b);
        // FI = 1 for this protocol.
        assert!(a.n_var >= 1.0 - 3.0 * a.n_var_stderr);
        assert!((a.mean - 0.5).abs() < 0.01);
    }
}
