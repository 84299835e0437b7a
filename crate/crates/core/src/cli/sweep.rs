//! Grid sweeps driven by an [`ExperimentConfig`].

use std::path::Path;

use rayon::prelude::*;
use serde_json::json;

use crate::error::Error;
use crate::experiment::readout::{apply_readout_noise, bayesian_unfold, UNFOLD_MAX_ITERS};
use crate::experiment::sampling::{replica_rng, sample_shots_with_rng};
use crate::protocols::{protocol_distribution, protocol_fim};
use crate::rotations::RotationParams;

use super::config::ExperimentConfig;
use super::output::{write_artifact, Artifact, Cell, Table};
use super::CliError;

/// Sorted `(θ, φ, α)` points of the config grid.
pub fn sweep_points(cfg: &ExperimentConfig) -> Vec<(f64, f64, f64)> {
    let mut pts = Vec::new();
    for &t in &cfg.theta.values() {
        for &p in &cfg.phi.values() {
            for &a in &cfg.alpha.values() {
                pts.push((t, p, a));
            }
        }
    }
    pts.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.total_cmp(&y.1))
            .then(x.2.total_cmp(&y.2))
    });
    pts.dedup();
    pts
}

/// Runs the sweep and writes `cfg.output` plus its sidecar. `base` resolves relative
/// readout paths. Point `k` in sorted order draws from RNG stream `k`.
pub fn run_sweep(cfg: &ExperimentConfig, base: &Path) -> Result<Artifact, CliError> {
    let diags = cfg.diagnostics(base);
    if !diags.is_empty() {
        return Err(CliError::InvalidConfig(diags));
    }
    let shots = cfg.shot_count();
    let pts = sweep_points(cfg);
    let probe = RotationParams::new(pts[0].2, pts[0].0, pts[0].1)?;
    let labels = protocol_distribution(&cfg.protocol, &probe, &cfg.noise)?
        .labels()
        .to_vec();
    let readout = cfg.readout.resolve(labels.len(), base)?;

    let rows: Vec<Result<Vec<Cell>, Error>> = pts
        .par_iter()
        .enumerate()
        .map(|(k, &(t, p, a))| {
            let rp = RotationParams::new(a, t, p)?;
            let d = protocol_distribution(&cfg.protocol, &rp, &cfg.noise)?;
            let observed = match &readout {
                Some(c) => apply_readout_noise(&d, c)?,
                None => d.clone(),
            };
            let mut row = vec![Cell::F(t), Cell::F(p), Cell::F(a)];
            let (freqs, counts) = if shots == 0 {
                (observed, None)
            } else {
                let table = sample_shots_with_rng(&observed, shots, &mut replica_rng(cfg.seed, k as u64))?;
                (table.frequencies()?, Some(table.counts))
            };
            let est = match &readout {
                Some(c) => bayesian_unfold(&freqs, c, UNFOLD_MAX_ITERS)?,
                None => freqs,
            };
            row.extend(est.probs().iter().map(|&x| Cell::F(x)));
            if let Some(counts) = counts {
                row.extend(counts.iter().map(|&n| Cell::I(n as i64)));
            }
            let fi = protocol_fim(&cfg.protocol, &rp, &cfg.noise)
                .map(|m| m.alpha_alpha())
                .unwrap_or(f64::NAN);
            row.push(Cell::F(fi));
            Ok(row)
        })
        .collect();

    let mut header: Vec<String> = vec!["theta".into(), "phi".into(), "alpha".into()];
    header.extend(labels.iter().map(|l| format!("p_{l}")));
    if shots > 0 {
        header.extend(labels.iter().map(|l| format!("n_{l}")));
    }
    header.push("fi_theory".into());
    let mut table = Table::new(&header);
    for r in rows {
        table.push(r?);
    }
    let config = serde_json::to_value(cfg).expect("plain data");
    let summary = json!({"points": pts.len(), "protocol": cfg.protocol.name()});
    write_artifact("sweep", &cfg.output, table, config, summary)
}
