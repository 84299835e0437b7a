//! Two-qubit state tomography by linear inversion and eigenvalue clipping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{hermitian_eig, kron, pauli, CMat, C64};
use crate::protocols::OutcomeDistribution;
use crate::states::DensityMx;

use super::sampling::ShotTable;

const NAMES: [char; 4] = ['I', 'X', 'Y', 'Z'];

/// Labels of the 15 non-identity two-qubit Paulis, probe first, in table order.
pub fn pauli_labels() -> Vec<String> {
    let mut out = Vec::with_capacity(15);
    for i in 0..4 {
        for j in 0..4 {
            if i + j > 0 {
                out.push(format!("{}{}", NAMES[i], NAMES[j]));
            }
        }
    }
    out
}

/// Index pairs `(i, j)` into `I, X, Y, Z` matching [`pauli_labels`].
fn pauli_pairs() -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(15);
    for i in 0..4 {
        for j in 0..4 {
            if i + j > 0 {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn two_qubit_pauli(i: usize, j: usize) -> CMat {
    kron(&pauli::by_index(i), &pauli::by_index(j)).expect("dim 4")
}

/// The 15 expectations `⟨σ_i ⊗ σ_j⟩` of `rho`.
pub fn pauli_expectations(rho: &DensityMx) -> [f64; 15] {
    let mut out = [0.0; 15];
    for (k, (i, j)) in pauli_pairs().into_iter().enumerate() {
        out[k] = rho.expectation(&two_qubit_pauli(i, j));
    }
    out
}

/// Measurement bases for the 9 correlator settings, `(probe, ancilla)` in `X, Y, Z`.
pub fn correlator_bases() -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(9);
    for i in 1..4 {
        for j in 1..4 {
            out.push((i, j));
        }
    }
    out
}

/// Outcome distribution of measuring `rho` in the product eigenbasis of `(σ_i, σ_j)`.
/// Labels `++`, `+-`, `-+`, `--` (probe sign first).
pub fn basis_distribution(rho: &DensityMx, basis: (usize, usize)) -> Result<OutcomeDistribution> {
    let proj = |k: usize| {
        let p = pauli::by_index(k);
        let i = CMat::identity(2);
        ((&i + &p).scale_real(0.5), (&i - &p).scale_real(0.5))
    };
    let (pp, pm) = proj(basis.0);
    let (ap, am) = proj(basis.1);
    let mut probs = Vec::with_capacity(4);
    for a in [&pp, &pm] {
        for b in [&ap, &am] {
            probs.push(rho.expectation(&kron(a, b)?));
        }
    }
    OutcomeDistribution::new(
        ["++", "+-", "-+", "--"].iter().map(|s| s.to_string()).collect(),
        probs,
    )
}

/// Tomography input in one of three accepted forms.
#[derive(Debug, Clone, PartialEq)]
pub enum TomographyInput {
    /// All 15 expectations in [`pauli_labels`] order.
    Paulis(Vec<f64>),
    /// Only the 9 correlators `XX, XY, …, ZZ`; local terms are taken as zero.
    Correlators(Vec<f64>),
    /// Nine shot tables in [`correlator_bases`] order; local terms are averaged over bases.
    BasisCounts(Vec<ShotTable>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub rho: DensityMx,
    /// 15 Pauli expectations used for the reconstruction.
    pub expectation_table: [f64; 15],
    /// `‖ρ − ρ_lin‖_F`
    pub fit_residual: f64,
}

#[derive(Serialize, Deserialize)]
struct TomographyJson {
    rho_re: Vec<Vec<f64>>,
    rho_im: Vec<Vec<f64>>,
    pauli_labels: Vec<String>,
    expectation_table: Vec<f64>,
    fit_residual: f64,
}

impl TomographyResult {
    pub fn to_json(&self) -> String {
        let rows = self.rho.mat().rows();
        let j = TomographyJson {
            rho_re: rows.iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            rho_im: rows.iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
            pauli_labels: pauli_labels(),
            expectation_table: self.expectation_table.to_vec(),
            fit_residual: self.fit_residual,
        };
        serde_json::to_string_pretty(&j).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: TomographyJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        if j.rho_re.len() != 4 || j.rho_im.len() != 4 || j.expectation_table.len() != 15 {
            return Err(Error::Tomography("malformed tomography JSON".into()));
        }
        let rows: Vec<Vec<C64>> = j
            .rho_re
            .iter()
            .zip(&j.rho_im)
            .map(|(r, i)| r.iter().zip(i).map(|(a, b)| C64::new(*a, *b)).collect())
            .collect();
        let rho = DensityMx::new(CMat::from_rows(&rows)?)?;
        let mut table = [0.0; 15];
        table.copy_from_slice(&j.expectation_table);
        Ok(Self {
            rho,
            expectation_table: table,
            fit_residual: j.fit_residual,
        })
    }
}

fn expectations_from_counts(tables: &[ShotTable]) -> Result<[f64; 15]> {
    if tables.len() != 9 {
        return Err(Error::Tomography(format!(
            "expected 9 basis tables, got {}",
            tables.len()
        )));
    }
    let mut table = [0.0; 15];
    let mut local_p = [0.0; 4];
    let mut local_a = [0.0; 4];
    for (t, (bi, bj)) in tables.iter().zip(correlator_bases()) {
        t.validate()?;
        let get = |l: &str| {
            t.count_of(l)
                .ok_or_else(|| Error::Tomography(format!("table lacks outcome `{l}`")))
        };
        let (pp, pm, mp, mm) = (get("++")?, get("+-")?, get("-+")?, get("--")?);
        if t.n_total == 0 {
            return Err(Error::Tomography("empty basis table".into()));
        }
        let n = t.n_total as f64;
        let (pp, pm, mp, mm) = (pp as f64, pm as f64, mp as f64, mm as f64);
        table[4 * bi + bj - 1] = (pp - pm - mp + mm) / n;
        local_p[bi] += (pp + pm - mp - mm) / n / 3.0;
        local_a[bj] += (pp - pm + mp - mm) / n / 3.0;
    }
    for k in 1..4 {
        table[k - 1] = local_a[k]; // I ⊗ σ_k
        table[4 * k - 1] = local_p[k]; // σ_k ⊗ I
    }
    Ok(table)
}

/// Linear inversion `ρ_lin = ¼ Σ ⟨σ_i⊗σ_j⟩ σ_i⊗σ_j`, then PSD projection by eigenvalue clipping.
pub fn tomography_two_qubit(input: &TomographyInput) -> Result<TomographyResult> {
    let table: [f64; 15] = match input {
        TomographyInput::Paulis(v) => {
            if v.len() != 15 {
                return Err(Error::Tomography(format!(
                    "expected 15 Pauli expectations, got {}",
                    v.len()
                )));
            }
            let mut t = [0.0; 15];
            t.copy_from_slice(v);
            t
        }
        TomographyInput::Correlators(v) => {
            if v.len() != 9 {
                return Err(Error::Tomography(format!(
                    "expected 9 correlators, got {}",
                    v.len()
                )));
            }
            let mut t = [0.0; 15];
            for (k, (i, j)) in correlator_bases().into_iter().enumerate() {
                t[4 * i + j - 1] = v[k];
            }
            t
        }
        TomographyInput::BasisCounts(tables) => expectations_from_counts(tables)?,
    };
    if let Some((k, v)) = table
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || v.abs() > 1.0 + 1e-9)
    {
        return Err(Error::Tomography(format!(
            "expectation {} = {v} exceeds 1",
            pauli_labels()[k]
        )));
    }

    let mut lin = CMat::identity(4).scale_real(0.25);
    for (k, (i, j)) in pauli_pairs().into_iter().enumerate() {
        lin = &lin + &two_qubit_pauli(i, j).scale_real(0.25 * table[k]);
    }
    let eig = hermitian_eig(&lin)?;
    let clipped: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Tomography("reconstruction has no positive part".into()));
    }
    let mut rho = CMat::zeros(4);
    for (l, v) in clipped.iter().zip(&eig.vectors) {
        rho = &rho + &v.projector().scale_real(l / total);
    }
    let rho = (&rho + &rho.adjoint()).scale_real(0.5);
    let fit_residual = (&rho - &lin).frobenius_norm();
    Ok(TomographyResult {
        rho: DensityMx::new(rho)?,
        expectation_table: table,
        fit_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::sampling::{exact_counts, sample_shots};
    use crate::states::{depolarized_singlet, fidelity, singlet};

    #[test]
    fn labels_order() {
        let l = pauli_labels();
        assert_eq!(l.len(), 15);
        assert_eq!(&l[..4], &["IX", "IY", "IZ", "XI"]);
        assert_eq!(l[14], "ZZ");
    }

    #[test]
    fn noiseless_singlet() {
        let s = singlet().density();
        let r = tomography_two_qubit(&TomographyInput::Paulis(pauli_expectations(&s).to_vec())).unwrap();
        assert!(fidelity(&r.rho, &s).unwrap() >= 0.9999);
        assert!(r.fit_residual < 1e-9);
        let r9 = tomography_two_qubit(&TomographyInput::Correlators(vec![
            -1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0,
        ]))
        .unwrap();
        assert!(fidelity(&r9.rho, &s).unwrap() >= 0.9999);
    }

    #[test]
    fn zero_expectations_give_maximally_mixed() {
        let r = tomography_two_qubit(&TomographyInput::Paulis(vec![0.0; 15])).unwrap();
        assert!(r.rho.mat().max_abs_diff(&CMat::identity(4).scale_real(0.25)) < 1e-12);
    }

    #[test]
    fn depolarized_singlet_fidelity() {
        let rho = depolarized_singlet(0.94).unwrap();
        let r = tomography_two_qubit(&TomographyInput::Paulis(pauli_expectations(&rho).to_vec())).unwrap();
        let f = fidelity(&r.rho, &singlet().density()).unwrap();
        assert!((f - 0.94).abs() < 1e-3);
        assert!(r.fit_residual < 1e-9);
    }

    #[test]
    fn basis_counts_round_trip() {
        let rho = depolarized_singlet(0.9).unwrap();
        let tables: Vec<ShotTable> = correlator_bases()
            .into_iter()
            .map(|b| exact_counts(&basis_distribution(&rho, b).unwrap(), 1_000_000).unwrap())
            .collect();
        let r = tomography_two_qubit(&TomographyInput::BasisCounts(tables)).unwrap();
        let f = fidelity(&r.rho, &singlet().density()).unwrap();
        assert!((f - 0.9).abs() < 1e-4);

        let noisy: Vec<ShotTable> = correlator_bases()
            .into_iter()
            .enumerate()
            .map(|(k, b)| sample_shots(&basis_distribution(&rho, b).unwrap(), 2000, k as u64).unwrap())
            .collect();
        let r = tomography_two_qubit(&TomographyInput::BasisCounts(noisy)).unwrap();
        assert!(DensityMx::new(r.rho.mat().clone()).is_ok());
        assert!((fidelity(&r.rho, &singlet().density()).unwrap() - 0.9).abs() < 0.05);
    }

    #[test]
    fn projection_clips_unphysical_input() {
        // All correlators −1 plus a local term is not a state.
        let mut v = vec![0.0; 15];
        v[2] = 0.5;
        for k in [4, 9, 14] {
            v[k] = -1.0;
        }
        let r = tomography_two_qubit(&TomographyInput::Paulis(v)).unwrap();
        assert!(r.rho.eigenvalues()[0] >= -1e-12);
        assert!(r.fit_residual > 0.0);
    }

    #[test]
    fn input_errors() {
        assert!(matches!(
            tomography_two_qubit(&TomographyInput::Paulis(vec![0.0; 14])),
            Err(Error::Tomography(_))
        ));
        assert!(matches!(
            tomography_two_qubit(&TomographyInput::Correlators(vec![2.0; 9])),
            Err(Error::Tomography(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let rho = depolarized_singlet(0.94).unwrap();
        let r = tomography_two_qubit(&TomographyInput::Paulis(pauli_expectations(&rho).to_vec())).unwrap();
        let back = TomographyResult::from_json(&r.to_json()).unwrap();
        assert!(back.rho.mat().max_abs_diff(r.rho.mat()) < 1e-15);
        assert_eq!(back.expectation_table, r.expectation_table);
    }
}
