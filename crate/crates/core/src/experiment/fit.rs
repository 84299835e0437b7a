//! Fisher information from a fitted fringe `P(α) = a + b₁ cos α + b₂ sin α`.
//!
//! The model covers both `a + b cos(α − c)` and `a + b cos²((α − c)/2)`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::sampling::ShotTable;

pub const MIN_SWEEP_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepFit {
    /// `(a, b₁, b₂)`
    pub coeffs: [f64; 3],
    pub at_alpha: f64,
    /// Fitted probability of the tracked outcome at `at_alpha`.
    pub p: f64,
    /// `P′²/(P(1−P))`
    pub fi: f64,
    /// Delta-method standard error of `fi`.
    pub fi_stderr: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
    /// Estimated covariance of `coeffs`, `σ²(XᵀX)⁻¹`.
    pub covariance: [[f64; 3]; 3],
}

impl SweepFit {
    pub fn prob_at(&self, alpha: f64) -> f64 {
        let [a, b1, b2] = self.coeffs;
        a + b1 * alpha.cos() + b2 * alpha.sin()
    }

    /// Fringe contrast `2√(b₁² + b₂²)`.
    pub fn contrast(&self) -> f64 {
        2.0 * self.coeffs[1].hypot(self.coeffs[2])
    }

    /// Delta-method standard error of [`SweepFit::contrast`].
    pub fn contrast_stderr(&self) -> f64 {
        contrast_stderr(&self.coeffs, &self.covariance)
    }
}

fn solve3(m: [[f64; 3]; 3], v: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    let scale = m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max).powi(3);
    if !(d.abs() > 1e-12 * scale) {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut mk = m;
        for r in 0..3 {
            mk[r][k] = v[r];
        }
        *slot = det(&mk) / d;
    }
    Some(out)
}

fn inverse3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut inv = [[0.0; 3]; 3];
    for c in 0..3 {
        let mut e = [0.0; 3];
        e[c] = 1.0;
        let col = solve3(m, e)?;
        for r in 0..3 {
            inv[r][c] = col[r];
        }
    }
    Some(inv)
}

/// Fits the empirical frequency of each table's first outcome over the sweep and
/// evaluates the FI of the fitted fringe at `at_alpha`.
pub fn fit_fi_from_sweep(samples: &[(f64, ShotTable)], at_alpha: f64) -> Result<SweepFit> {
    let mut ys = Vec::with_capacity(samples.len());
    for (alpha, t) in samples {
        if t.n_total == 0 || t.counts.is_empty() {
            return Err(Error::ZeroObserved);
        }
        ys.push((*alpha, t.counts[0] as f64 / t.n_total as f64));
    }
    fit_fi_from_points(&ys, at_alpha)
}

/// Least-squares fringe `a + b₁ cos α + b₂ sin α` with coefficient covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fringe {
    pub coeffs: [f64; 3],
    pub covariance: [[f64; 3]; 3],
    pub rms_residual: f64,
    #[serde(skip)]
    pub(crate) rss: f64,
    #[serde(skip)]
    pub(crate) xtx_inv: [[f64; 3]; 3],
    #[serde(skip)]
    pub(crate) dof: f64,
}

impl Fringe {
    pub fn prob_at(&self, alpha: f64) -> f64 {
        let [a, b1, b2] = self.coeffs;
        a + b1 * alpha.cos() + b2 * alpha.sin()
    }

    pub fn contrast(&self) -> f64 {
        2.0 * self.coeffs[1].hypot(self.coeffs[2])
    }

    pub fn contrast_stderr(&self) -> f64 {
        contrast_stderr(&self.coeffs, &self.covariance)
    }
}

fn contrast_stderr(coeffs: &[f64; 3], cov: &[[f64; 3]; 3]) -> f64 {
    let r = coeffs[1].hypot(coeffs[2]);
    if r == 0.0 {
        return 2.0 * cov[1][1].max(cov[2][2]).max(0.0).sqrt();
    }
    let g = [0.0, 2.0 * coeffs[1] / r, 2.0 * coeffs[2] / r];
    let mut var = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            var += g[i] * cov[i][j] * g[j];
        }
    }
    var.max(0.0).sqrt()
}

/// Fits the fringe to `(α, frequency)` pairs. Needs at least five points spanning π/2.
pub fn fit_fringe(ys: &[(f64, f64)]) -> Result<Fringe> {
    if ys.len() < MIN_SWEEP_POINTS {
        return Err(Error::FitFailed {
            reason: format!("need at least {MIN_SWEEP_POINTS} sweep points, got {}", ys.len()),
            residual: f64::NAN,
        });
    }
    let lo = ys.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = ys.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < FRAC_PI_2 - 1e-12 {
        return Err(Error::FitFailed {
            reason: format!("sweep [{lo}, {hi}] must span pi/2"),
            residual: f64::NAN,
        });
    }
    let mut xtx = [[0.0; 3]; 3];
    let mut xty = [0.0; 3];
    for &(a, y) in ys {
        let x = basis(a);
        for i in 0..3 {
            xty[i] += x[i] * y;
            for j in 0..3 {
                xtx[i][j] += x[i] * x[j];
            }
        }
    }
    let coeffs = solve3(xtx, xty).ok_or_else(|| Error::FitFailed {
        reason: "sweep points do not determine the fringe".into(),
        residual: f64::NAN,
    })?;
    let rss: f64 = ys
        .iter()
        .map(|&(a, y)| {
            let x = basis(a);
            let r = y - (coeffs[0] * x[0] + coeffs[1] * x[1] + coeffs[2] * x[2]);
            r * r
        })
        .sum();
    let dof = ys.len().saturating_sub(3).max(1) as f64;
    let xtx_inv = inverse3(xtx).unwrap_or([[0.0; 3]; 3]);
    let mut covariance = xtx_inv;
    for row in covariance.iter_mut() {
        for v in row.iter_mut() {
            *v *= rss / dof;
        }
    }
    Ok(Fringe {
        coeffs,
        covariance,
        rms_residual: (rss / ys.len() as f64).sqrt(),
        rss,
        xtx_inv,
        dof,
    })
}

fn basis(a: f64) -> [f64; 3] {
    [1.0, a.cos(), a.sin()]
}

/// Same fit on `(α, frequency)` pairs.
pub fn fit_fi_from_points(ys: &[(f64, f64)], at_alpha: f64) -> Result<SweepFit> {
    let fringe = fit_fringe(ys)?;
    let lo = ys.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = ys.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    if at_alpha < lo || at_alpha > hi {
        return Err(Error::FitFailed {
            reason: format!("evaluation point {at_alpha} is outside the sweep [{lo}, {hi}]"),
            residual: f64::NAN,
        });
    }
    let Fringe {
        coeffs,
        covariance,
        rms_residual,
        rss,
        xtx_inv: inv,
        dof,
    } = fringe;

    let x = basis(at_alpha);
    let d = [0.0, -at_alpha.sin(), at_alpha.cos()];
    let p = coeffs[0] * x[0] + coeffs[1] * x[1] + coeffs[2] * x[2];
    let dp = coeffs[1] * d[1] + coeffs[2] * d[2];
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::FitFailed {
            reason: format!("fitted probability {p} at alpha = {at_alpha} is outside (0, 1)"),
            residual: rms_residual,
        });
    }
    let q = p * (1.0 - p);
    let fi = dp * dp / q;

    // Delta method with covariance σ²(XᵀX)⁻¹.
    let sigma2 = rss / dof;
    let grad: Vec<f64> = (0..3)
        .map(|i| 2.0 * dp * d[i] / q - dp * dp * (1.0 - 2.0 * p) * x[i] / (q * q))
        .collect();
    let mut var = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            var += grad[i] * inv[i][j] * grad[j];
        }
    }
    Ok(SweepFit {
        coeffs,
        at_alpha,
        p,
        fi,
        fi_stderr: (sigma2 * var).max(0.0).sqrt(),
        rms_residual,
        covariance,
    })
}
