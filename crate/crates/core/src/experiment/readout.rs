use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::OutcomeDistribution;

use super::sampling::ShotTable;

/// Single-shot assignment fidelity of the probe readout.
pub const PROBE_READOUT_FIDELITY: f64 = 0.978;
/// Single-shot assignment fidelity of the ancilla readout.
pub const ANCILLA_READOUT_FIDELITY: f64 = 0.989;

pub const UNFOLD_TOL: f64 = 1e-10;
pub const UNFOLD_MAX_ITERS: usize = 1000;

/// Row-stochastic readout map: rows are true outcomes, columns observed outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfusionJson", into = "ConfusionJson")]
pub struct ConfusionMatrix {
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ConfusionJson {
    rows: Vec<Vec<f64>>,
}

impl TryFrom<ConfusionJson> for ConfusionMatrix {
    type Error = Error;
    fn try_from(j: ConfusionJson) -> Result<Self> {
        ConfusionMatrix::new(j.rows)
    }
}

impl From<ConfusionMatrix> for ConfusionJson {
    fn from(c: ConfusionMatrix) -> Self {
        ConfusionJson { rows: c.rows }
    }
}

impl ConfusionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidArgument("empty confusion matrix".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: row.len(),
                });
            }
            if row.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::InvalidArgument(format!(
                    "confusion row {i} has entries outside [0, 1]"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "confusion row {i} sums to {s}"
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn identity(k: usize) -> Self {
        let rows = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { rows }
    }

    /// Two-outcome readout that flips either result with probability `1 − fidelity`.
    pub fn symmetric(fidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::OutOfRange {
                name: "readout_fidelity",
                value: fidelity,
                range: "[0, 1]",
            });
        }
        Self::new(vec![
            vec![fidelity, 1.0 - fidelity],
            vec![1.0 - fidelity, fidelity],
        ])
    }

    /// Independent readouts; joint outcome `(i, j)` is index `i·k_b + j`.
    pub fn product(a: &ConfusionMatrix, b: &ConfusionMatrix) -> Self {
        let kb = b.dim();
        let k = a.dim() * kb;
        let mut rows = vec![vec![0.0; k]; k];
        for (i, ra) in a.rows.iter().enumerate() {
            for (j, rb) in b.rows.iter().enumerate() {
                for (x, va) in ra.iter().enumerate() {
                    for (y, vb) in rb.iter().enumerate() {
                        rows[i * kb + j][x * kb + y] = va * vb;
                    }
                }
            }
        }
        Self { rows }
    }

    /// Probe then ancilla, symmetric errors at the calibrated fidelities.
    pub fn default_two_qubit() -> Self {
        Self::product(
            &Self::symmetric(PROBE_READOUT_FIDELITY).unwrap(),
            &Self::symmetric(ANCILLA_READOUT_FIDELITY).unwrap(),
        )
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: n,
            });
        }
        Ok(())
    }
}

/// `p_obs = pᵀ C`
pub fn apply_readout_noise(d: &OutcomeDistribution, c: &ConfusionMatrix) -> Result<OutcomeDistribution> {
    c.check_dim(d.len())?;
    let k = c.dim();
    let obs = (0..k)
        .map(|j| (0..k).map(|i| d.probs()[i] * c.rows[i][j]).sum())
        .collect();
    OutcomeDistribution::new(d.labels().to_vec(), obs)
}

/// Iterative Bayesian unfolding from a uniform prior.
pub fn bayesian_unfold(
    observed: &OutcomeDistribution,
    c: &ConfusionMatrix,
    max_iters: usize,
) -> Result<OutcomeDistribution> {
    c.check_dim(observed.len())?;
    let m = observed.probs();
    if m.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroObserved);
    }
    let k = c.dim();
    let mut t = vec![1.0 / k as f64; k];
    for _ in 0..max_iters {
        // Predicted observation under the current truth estimate.
        let pred: Vec<f64> = (0..k)
            .map(|j| (0..k).map(|i| t[i] * c.rows[i][j]).sum())
            .collect();
        let next: Vec<f64> = (0..k)
            .map(|i| {
                let s: f64 = (0..k)
                    .filter(|&j| pred[j] > 0.0)
                    .map(|j| c.rows[i][j] * m[j] / pred[j])
                    .sum();
                t[i] * s
            })
            .collect();
        let norm: f64 = next.iter().sum();
        let next: Vec<f64> = next.iter().map(|x| x / norm).collect();
        let change: f64 = next.iter().zip(&t).map(|(a, b)| (a - b).abs()).sum();
        t = next;
        if change < UNFOLD_TOL {
            break;
        }
    }
    OutcomeDistribution::new(observed.labels().to_vec(), t)
}

pub fn bayesian_unfold_counts(
    observed: &ShotTable,
    c: &ConfusionMatrix,
    max_iters: usize,
) -> Result<OutcomeDistribution> {
    if observed.n_total == 0 {
        return Err(Error::ZeroObserved);
    }
    bayesian_unfold(&observed.frequencies()?, c, max_iters)
}
