use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

/// Square complex matrix equal to its conjugate transpose.
///
/// Construction symmetrizes the input as `(m + m†)/2`, so asymmetric
/// round-off from files or products never leaks into eigen-decompositions.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

/// Spectral decomposition `m = U diag(values) U†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    /// Rebuilds `U diag(f(λ)) U†`.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        HermitianMatrix::from_raw(&scaled * self.vectors.adjoint())
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k).iter().copied().collect()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty("matrix of dimension 0"));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix has non-finite entries".into()));
        }
        Ok(Self::from_raw(m))
    }

    /// Symmetrizes without shape validation; callers guarantee squareness.
    pub(crate) fn from_raw(m: CMatrix) -> Self {
        let adj = m.adjoint();
        Self { m: (m + adj) * C64::new(0.5, 0.0) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: CMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self { m: CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) }) }
    }

    /// Rank-one projector onto the (normalized) vector `v`.
    pub fn projector(v: &[C64]) -> Self {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let n = v.len();
        let m = CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj() / (norm * norm));
        Self::from_raw(m)
    }

    /// Row-major real/imaginary pairs.
    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: r.len() });
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
    }

    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| [self.m[(i, j)].re, self.m[(i, j)].im]).collect()).collect()
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    /// `tr(self · other)`, real for Hermitian arguments.
    pub fn inner(&self, other: &HermitianMatrix) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.m[(i, j)] * other.m[(j, i)]).re;
            }
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: &self.m * C64::new(s, 0.0) }
    }

    pub fn transpose(&self) -> Self {
        Self { m: self.m.transpose() }
    }

    /// Conjugation `A X A†` by an arbitrary square matrix.
    pub fn conjugate_by(&self, a: &CMatrix) -> Self {
        Self::from_raw(a * &self.m * a.adjoint())
    }

    pub fn kron(&self, other: &HermitianMatrix) -> Self {
        Self { m: self.m.kronecker(&other.m) }
    }

    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        self.m.iter().zip(other.m.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigen-decomposition with eigenvalues sorted ascending.
    pub fn eig(&self) -> Result<Eigen> {
        let n = self.dim();
        let decomposition = SymmetricEigen::try_new(self.m.clone(), EIG_EPS, EIG_MAX_ITER)
            .ok_or_else(|| Error::NumericalFailure(format!("Hermitian eigensolver did not converge (dim {n})")))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| decomposition.eigenvalues[a].total_cmp(&decomposition.eigenvalues[b]));
        let values = order.iter().map(|&k| decomposition.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| decomposition.eigenvectors[(i, order[j])]);
        Ok(Eigen { values, vectors })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eig()?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.min())
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.max())
    }

    /// Applies a scalar function to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Ok(self.eig()?.rebuild(f))
    }

    /// Positive and negative parts: `self = pos - neg` with `pos, neg ⪰ 0`.
    pub fn jordan_parts(&self) -> Result<(Self, Self)> {
        let e = self.eig()?;
        Ok((e.rebuild(|x| x.max(0.0)), e.rebuild(|x| (-x).max(0.0))))
    }

    /// Orthogonal projection onto the positive semidefinite cone.
    pub fn psd_part(&self) -> Result<Self> {
        self.map_spectrum(|x| x.max(0.0))
    }

    /// Partial trace over the first factor of a `d_a ⊗ d_b` space.
    pub fn partial_trace_first(&self, d_a: usize, d_b: usize) -> Result<Self> {
        self.check_split(d_a, d_b)?;
        let m = CMatrix::from_fn(d_b, d_b, |b, bp| (0..d_a).map(|a| self.m[(a * d_b + b, a * d_b + bp)]).sum());
        Ok(Self::from_raw(m))
    }

    /// Partial trace over the second factor of a `d_a ⊗ d_b` space.
    pub fn partial_trace_second(&self, d_a: usize, d_b: usize) -> Result<Self> {
        self.check_split(d_a, d_b)?;
        let m = CMatrix::from_fn(d_a, d_a, |a, ap| (0..d_b).map(|b| self.m[(a * d_b + b, ap * d_b + b)]).sum());
        Ok(Self::from_raw(m))
    }

    fn check_split(&self, d_a: usize, d_b: usize) -> Result<()> {
        if d_a * d_b != self.dim() {
            return Err(Error::DimensionMismatch { expected: d_a * d_b, found: self.dim() });
        }
        Ok(())
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { m: &self.m + &rhs.m }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { m: &self.m - &rhs.m }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(m: &HermitianMatrix) -> Result<f64> {
    Ok(m.eigenvalues()?.iter().map(|x| x.abs()).sum())
}

/// Matrix logarithm of a positive semidefinite matrix.
///
/// With `support_only`, eigenvalues at or below the clipping threshold map to
/// zero instead of `-inf`.
pub fn matrix_log(m: &HermitianMatrix, support_only: bool) -> Result<HermitianMatrix> {
    let e = m.eig()?;
    if e.min() < -super::PSD_TOLERANCE {
        return Err(Error::Domain(format!("matrix log of a matrix with eigenvalue {:.3e}", e.min())));
    }
    if !support_only && e.min() <= 0.0 {
        return Err(Error::Domain("matrix log of a singular matrix without support convention".into()));
    }
    Ok(e.rebuild(|x| if x <= 0.0 { 0.0 } else { x.ln() }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spectrum() {
        assert_eq!(HermitianMatrix::identity(2).eigenvalues().unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let v = HermitianMatrix::from_real_diagonal(&[3.0, -1.0]).eigenvalues().unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn construction_symmetrizes() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0 + 1e-13), C64::new(2.0, 0.0)]);
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(HermitianMatrix::new(CMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn trace_norm_cases() {
        assert_eq!(trace_norm(&HermitianMatrix::zeros(3)).unwrap(), 0.0);
        let d = &HermitianMatrix::from_real_diagonal(&[1.0, 0.0]) - &HermitianMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert!((trace_norm(&d).unwrap() - 2.0).abs() < 1e-14);
        let (p, q) = (0.37, 0.81);
        let d = &HermitianMatrix::from_real_diagonal(&[p, 1.0 - p]) - &HermitianMatrix::from_real_diagonal(&[q, 1.0 - q]);
        assert!((trace_norm(&d).unwrap() - 2.0 * (p - q).abs()).abs() < 1e-14);
    }

    #[test]
    fn log_cases() {
        assert!(matrix_log(&HermitianMatrix::identity(3), false).unwrap().max_abs() < 1e-14);
        let l = matrix_log(&HermitianMatrix::from_real_diagonal(&[std::f64::consts::E, 1.0]), false).unwrap();
        assert!((l.get(0, 0).re - 1.0).abs() < 1e-14 && l.get(1, 1).re.abs() < 1e-14);
        let l = matrix_log(&HermitianMatrix::from_real_diagonal(&[0.5, 0.5]), false).unwrap();
        assert!((l.get(0, 0).re - 0.5f64.ln()).abs() < 1e-14);
        let l = matrix_log(&HermitianMatrix::from_real_diagonal(&[1.0, 0.0]), true).unwrap();
        assert!(l.max_abs() < 1e-14);
        assert!(matrix_log(&HermitianMatrix::from_real_diagonal(&[1.0, -1e-6]), true).is_err());
    }

    #[test]
    fn partial_traces_of_product() {
        let a = HermitianMatrix::from_real_diagonal(&[0.2, 0.8]);
        let b = HermitianMatrix::from_real_diagonal(&[0.1, 0.3, 0.6]);
        let ab = a.kron(&b);
        assert!(ab.partial_trace_first(2, 3).unwrap().max_abs_diff(&b) < 1e-15);
        assert!(ab.partial_trace_second(2, 3).unwrap().max_abs_diff(&a) < 1e-15);
    }
}
