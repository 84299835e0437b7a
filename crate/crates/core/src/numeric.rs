//! Dense complex linear algebra for the tiny Hilbert spaces used here.
//!
//! Matrices are row-major and square. Qubit and two-qubit operators are
//! dimension 2 and 4; a few helpers (ancilla-tagged ensembles, 3×3 Fisher
//! matrices) use other small dimensions, so any dimension up to
//! [`MAX_DIM`] is accepted.
//!
//! The Hermitian eigensolver uses a closed form for 2×2 and a cyclic
//! complex Jacobi sweep otherwise.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const MAX_DIM: usize = 8;

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Max-norm defect of `m - m†` accepted as Hermitian.
    pub const HERMITIAN: f64 = 1e-10;
    /// Eigenvalues above `-PSD` are clipped to zero.
    pub const PSD: f64 = 1e-10;
    /// Unit-norm tolerance for state vectors.
    pub const STATE_NORM: f64 = 1e-12;
    /// Density-matrix trace tolerance.
    pub const TRACE: f64 = 1e-10;
    /// Smallest eigenvalue tolerated for a density matrix.
    pub const DENSITY_EIG: f64 = 1e-9;
    /// Jacobi stopping criterion on the largest off-diagonal modulus.
    pub const JACOBI_OFF: f64 = 1e-13;
    pub const JACOBI_MAX_SWEEPS: usize = 100;
    /// `|tr(U†V)| = dim` within this for global-phase equality.
    pub const GLOBAL_PHASE: f64 = 1e-9;
    /// Probability vectors must sum to one within this.
    pub const PROB_SUM: f64 = 1e-10;
    /// Finite-difference step for parameter derivatives (radians).
    pub const FD_STEP: f64 = 1e-5;
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

/// Complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec {
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0 && dim <= MAX_DIM, "unsupported dimension {dim}");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from row slices; every row must have `rows.len()` entries.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[C64]) -> Result<Self> {
        check_dim(values.len())?;
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        Ok(m)
    }

    pub fn diag_real(values: &[f64]) -> Result<Self> {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, rhs: &CMat) -> Result<CMat> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &CVec) -> Result<CVec> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
            });
        }
        let n = self.dim;
        let data = (0..n)
            .map(|i| (0..n).map(|j| self[(i, j)] * v.data[j]).sum())
            .collect();
        Ok(CVec { data })
    }

    /// `U · self · U†`
    pub fn conjugate_by(&self, u: &CMat) -> Result<CMat> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |m_ij - conj(m_ji)|`
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > tol::HERMITIAN {
            Err(Error::NotHermitian {
                defect,
                tol: tol::HERMITIAN,
            })
        } else {
            Ok(())
        }
    }

    /// `‖U†U − I‖_max`
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .expect("same dimension")
            .max_abs_diff(&CMat::identity(self.dim))
    }

    /// Real part of `tr(self · rhs)`, the expectation pairing for Hermitian operands.
    pub fn trace_product_re(&self, rhs: &CMat) -> f64 {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += (self.data[i * n + k] * rhs.data[k * n + i]).re;
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs).expect("dimension mismatch in matrix product")
    }
}

impl CVec {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        check_dim(data.len())?;
        Ok(Self { data })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut data = vec![C64::new(0.0, 0.0); dim];
        data[index] = C64::new(1.0, 0.0);
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVec) -> C64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(C64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CVec) -> Self {
        Self {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CVec) -> Self {
        Self {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `|self⟩⟨other|`
    pub fn outer(&self, other: &CVec) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.data[i] * other.data[j].conj();
            }
        }
        m
    }

    pub fn projector(&self) -> CMat {
        self.outer(self)
    }

    /// Multiplies by the phase that makes the first non-negligible component real-positive.
    pub fn canonical_phase(&self) -> Self {
        let scale = self.norm().max(f64::MIN_POSITIVE);
        match self.data.iter().find(|z| z.norm() > 1e-12 * scale) {
            Some(z) => self.scale(z.conj() / z.norm()),
            None => self.clone(),
        }
    }

    pub fn max_abs_diff(&self, other: &CVec) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CVec {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

/// Pauli matrices and friends.
pub mod pauli {
    use super::{c, CMat};

    pub fn i2() -> CMat {
        CMat::identity(2)
    }

    pub fn x() -> CMat {
        CMat::from_rows(&[[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]).unwrap()
    }

    pub fn y() -> CMat {
        CMat::from_rows(&[[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]).unwrap()
    }

    pub fn z() -> CMat {
        CMat::from_rows(&[[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]).unwrap()
    }

    /// `I, X, Y, Z` indexed 0..4.
    pub fn by_index(k: usize) -> CMat {
        match k {
            0 => i2(),
            1 => x(),
            2 => y(),
            3 => z(),
            _ => panic!("Pauli index {k} out of range"),
        }
    }

    /// `v · σ` for a real 3-vector.
    pub fn dot(v: [f64; 3]) -> CMat {
        let mut m = &x().scale_real(v[0]) + &y().scale_real(v[1]);
        m = &m + &z().scale_real(v[2]);
        m
    }
}

/// Tensor product; index `(i, j) ⊗ (k, l)` maps to `(i·db + k, j·db + l)`.
pub fn kron(a: &CMat, b: &CMat) -> Result<CMat> {
    let (da, db) = (a.dim(), b.dim());
    let n = da * db;
    check_dim(n)?;
    let mut out = CMat::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> Result<CVec> {
    let mut data = Vec::with_capacity(a.dim() * b.dim());
    for x in a.as_slice() {
        for y in b.as_slice() {
            data.push(x * y);
        }
    }
    CVec::new(data)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal, paired with `values`, each in canonical phase.
    pub vectors: Vec<CVec>,
}

impl Eigen {
    /// `Σ f(λ_i) |v_i⟩⟨v_i|`
    pub fn reconstruct_with<F: Fn(f64) -> C64>(&self, f: F) -> CMat {
        let n = self.values.len();
        let mut m = CMat::zeros(n);
        for (&lam, v) in self.values.iter().zip(&self.vectors) {
            let w = f(lam);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += w * v[i] * v[j].conj();
                }
            }
        }
        m
    }

    pub fn reconstruct(&self) -> CMat {
        self.reconstruct_with(|l| C64::new(l, 0.0))
    }
}

pub fn hermitian_eig(m: &CMat) -> Result<Eigen> {
    m.ensure_hermitian()?;
    if m.dim() == 1 {
        return Ok(Eigen {
            values: vec![m[(0, 0)].re],
            vectors: vec![CVec::basis(1, 0)],
        });
    }
    if m.dim() == 2 {
        return Ok(eig2(m));
    }
    jacobi_eig(m)
}

fn eig2(m: &CMat) -> Eigen {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    // Hermitian average of the off-diagonal pair.
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let mid = 0.5 * (a + d);
    let values = vec![mid - half_gap, mid + half_gap];

    let scale = a.abs().max(d.abs()).max(b.norm()).max(f64::MIN_POSITIVE);
    if b.norm() <= 1e-300 || half_gap <= 1e-15 * scale {
        // Already diagonal (or scalar).
        let (lo, hi) = if a <= d { (0, 1) } else { (1, 0) };
        return Eigen {
            values,
            vectors: vec![CVec::basis(2, lo), CVec::basis(2, hi)],
        };
    }
    let vectors = values
        .iter()
        .map(|&lam| {
            // Two algebraically equivalent null vectors of (m - λ); keep the better-conditioned one.
            let v1 = [b, C64::new(lam - a, 0.0)];
            let v2 = [C64::new(lam - d, 0.0), b.conj()];
            let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
            let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
            let v = if n1 >= n2 { v1 } else { v2 };
            CVec { data: v.to_vec() }.normalized().canonical_phase()
        })
        .collect();
    Eigen { values, vectors }
}

fn off_diagonal_max(m: &CMat) -> f64 {
    let n = m.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

fn jacobi_eig(m: &CMat) -> Result<Eigen> {
    let n = m.dim();
    // Symmetrize away the sub-tolerance anti-Hermitian part.
    let mut a = (&(m + &m.adjoint())).scale_real(0.5);
    let mut v = CMat::identity(n);
    let threshold = tol::JACOBI_OFF * m.max_abs().max(1.0);

    let mut sweeps = 0;
    while off_diagonal_max(&a) > threshold {
        if sweeps == tol::JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off: off_diagonal_max(&a),
            });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= threshold * 1e-3 {
                    continue;
                }
                let phase = apq / r; // e^{iβ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // G = D(q: e^{-iβ}) · R(p,q; c, s)
                let mut g = CMat::identity(n);
                g[(p, p)] = C64::new(cs, 0.0);
                g[(p, q)] = C64::new(sn, 0.0);
                g[(q, p)] = -phase.conj() * sn;
                g[(q, q)] = phase.conj() * cs;
                a = &(&g.adjoint() * &a) * &g;
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                v = &v * &g;
            }
        }
        sweeps += 1;
    }

    let mut pairs: Vec<(f64, CVec)> = (0..n)
        .map(|k| {
            let col = CVec {
                data: (0..n).map(|i| v[(i, k)]).collect(),
            };
            (a[(k, k)].re, col.canonical_phase())
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(Eigen { values, vectors })
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-1e-10, 0)` are clipped.
pub fn matrix_sqrt_psd(m: &CMat) -> Result<CMat> {
    let eig = hermitian_eig(m)?;
    let min = eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -tol::PSD {
        return Err(Error::NotPsd(min));
    }
    Ok(eig.reconstruct_with(|l| C64::new(l.max(0.0).sqrt(), 0.0)))
}

/// `exp(−i t g)` for Hermitian `g`.
pub fn expm_generator(g: &CMat, t: f64) -> Result<CMat> {
    let eig = hermitian_eig(g)?;
    Ok(eig.reconstruct_with(|l| C64::from_polar(1.0, -t * l)))
}

/// `|tr(U†V)| = dim` within [`tol::GLOBAL_PHASE`].
pub fn equal_up_to_global_phase(u: &CMat, v: &CMat) -> bool {
    global_phase_defect(u, v) <= tol::GLOBAL_PHASE
}

pub fn global_phase_defect(u: &CMat, v: &CMat) -> f64 {
    let overlap = (&u.adjoint() * v).trace().norm();
    (u.dim() as f64 - overlap).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn random_hermitian(seed: &[f64], n: usize) -> CMat {
        let mut m = CMat::zeros(n);
        let mut k = 0;
        for i in 0..n {
            m[(i, i)] = c(seed[k % seed.len()], 0.0);
            k += 1;
            for j in i + 1..n {
                let z = c(seed[k % seed.len()], seed[(k + 1) % seed.len()]);
                k += 2;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn kron_examples() {
        let i4 = kron(&pauli::i2(), &pauli::i2()).unwrap();
        assert_eq!(i4, CMat::identity(4));
        let zz = kron(&pauli::z(), &pauli::z()).unwrap();
        assert_eq!(zz, CMat::diag_real(&[1.0, -1.0, -1.0, 1.0]).unwrap());
        let xi = kron(&pauli::x(), &pauli::i2()).unwrap();
        let out = xi.apply(&CVec::basis(4, 0)).unwrap();
        assert!(out.max_abs_diff(&CVec::basis(4, 2)) < 1e-15);
    }

    #[test]
    fn eig_of_paulis() {
        let e = hermitian_eig(&pauli::z()).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
        let e = hermitian_eig(&pauli::x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        let s = 1.0 / 2f64.sqrt();
        let minus = CVec::from_real(&[s, -s]).unwrap();
        let plus = CVec::from_real(&[s, s]).unwrap();
        assert!(e.vectors[0].max_abs_diff(&minus) < 1e-12);
        assert!(e.vectors[1].max_abs_diff(&plus) < 1e-12);
    }

    #[test]
    fn eig_of_rank_one_projector() {
        let s = 1.0 / 2f64.sqrt();
        let singlet = CVec::from_real(&[0.0, s, -s, 0.0]).unwrap();
        let e = hermitian_eig(&singlet.projector()).unwrap();
        for (got, want) in e.values.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(e.reconstruct().max_abs_diff(&singlet.projector()) < 1e-9);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMat::from_rows(&[[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        match hermitian_eig(&m) {
            Err(Error::NotHermitian { defect, tol }) => {
                assert!((defect - 1.0).abs() < 1e-15);
                assert_eq!(tol, tol::HERMITIAN);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sqrt_examples() {
        let i = CMat::identity(2);
        assert!(matrix_sqrt_psd(&i).unwrap().max_abs_diff(&i) < 1e-15);
        let d = CMat::diag_real(&[4.0, 9.0]).unwrap();
        let want = CMat::diag_real(&[2.0, 3.0]).unwrap();
        assert!(matrix_sqrt_psd(&d).unwrap().max_abs_diff(&want) < 1e-12);
        let s = 1.0 / 2f64.sqrt();
        let p = CVec::from_real(&[s, 0.0, 0.0, s]).unwrap().projector();
        assert!(matrix_sqrt_psd(&p).unwrap().max_abs_diff(&p) < 1e-9);
        match matrix_sqrt_psd(&CMat::diag_real(&[1.0, -0.5]).unwrap()) {
            Err(Error::NotPsd(v)) => assert_eq!(v, -0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn expm_examples() {
        let g = pauli::x();
        assert!(expm_generator(&g, 0.0).unwrap().max_abs_diff(&CMat::identity(2)) < 1e-15);
        let u = expm_generator(&g, PI / 2.0).unwrap();
        assert!(u.max_abs_diff(&pauli::x().scale(c(0.0, -1.0))) < 1e-12);
        let u = expm_generator(&pauli::z().scale_real(0.5), PI / 2.0).unwrap();
        let want = CMat::diag(&[C64::from_polar(1.0, -PI / 4.0), C64::from_polar(1.0, PI / 4.0)])
            .unwrap();
        assert!(u.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn jacobi_handles_degenerate_and_complex() {
        // Two-qubit Heisenberg coupling: eigenvalues -3, 1, 1, 1.
        let xx = kron(&pauli::x(), &pauli::x()).unwrap();
        let yy = kron(&pauli::y(), &pauli::y()).unwrap();
        let zz = kron(&pauli::z(), &pauli::z()).unwrap();
        let h = &(&xx + &yy) + &zz;
        let e = hermitian_eig(&h).unwrap();
        for (got, want) in e.values.iter().zip([-3.0, 1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{:?}", e.values);
        }
        assert!(e.reconstruct().max_abs_diff(&h) < 1e-9);
    }

    fn arb_entries() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0f64..1.0, 16..=16)
    }

    proptest! {
        #[test]
        fn eig_reconstructs_and_is_orthonormal(seed in arb_entries()) {
            for n in [2usize, 3, 4, 6] {
                let m = random_hermitian(&seed, n);
                let e = hermitian_eig(&m).unwrap();
                prop_assert!(e.reconstruct().max_abs_diff(&m) < 1e-9);
                for i in 0..n {
                    for j in 0..n {
                        let ip = e.vectors[i].inner(&e.vectors[j]);
                        let want = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((ip - c(want, 0.0)).norm() < 1e-10);
                    }
                }
                prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            }
        }

        #[test]
        fn kron_mixed_product(s in prop::collection::vec(-1.0f64..1.0, 32..=32)) {
            let mk = |o: usize| CMat::from_rows(&[
                [c(s[o], s[o + 1]), c(s[o + 2], s[o + 3])],
                [c(s[o + 4], s[o + 5]), c(s[o + 6], s[o + 7])],
            ]).unwrap();
            let (a, b, cc, d) = (mk(0), mk(8), mk(16), mk(24));
            let lhs = &kron(&a, &b).unwrap() * &kron(&cc, &d).unwrap();
            let rhs = kron(&(&a * &cc), &(&b * &d)).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }

        #[test]
        fn expm_is_unitary_and_additive(seed in arb_entries(), s in -3.0f64..3.0, t in -3.0f64..3.0) {
            for n in [2usize, 4] {
                let g = random_hermitian(&seed, n);
                let us = expm_generator(&g, s).unwrap();
                let ut = expm_generator(&g, t).unwrap();
                let ust = expm_generator(&g, s + t).unwrap();
                prop_assert!(us.unitarity_defect() <= 1e-10);
                prop_assert!((&us * &ut).max_abs_diff(&ust) <= 1e-10);
            }
        }

        #[test]
        fn trace_linear_and_cyclic(sa in arb_entries(), sb in arb_entries(), k in -2.0f64..2.0) {
            let a = random_hermitian(&sa, 4);
            let b = random_hermitian(&sb, 4);
            let lin = (&a + &b.scale_real(k)).trace() - (a.trace() + b.trace() * k);
            prop_assert!(lin.norm() < 1e-12);
            prop_assert!(((&a * &b).trace() - (&b * &a).trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn global_phase_comparison() {
        let u = pauli::x();
        let v = u.scale(C64::from_polar(1.0, 0.7));
        assert!(equal_up_to_global_phase(&u, &v));
        assert!(!equal_up_to_global_phase(&u, &pauli::z()));
    }
}
