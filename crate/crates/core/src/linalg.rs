//! Dense complex matrices and the Hermitian primitives built on them.
//!
//! Everything downstream (states, observables, evolution operators) is a
//! [`ComplexMatrix`]. Matrix functions are only defined for Hermitian input
//! and go through a single eigendecomposition.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QslError, Result};

pub type C64 = Complex64;

/// Entry-wise tolerance on `|H - H^dagger|` for Hermitian inputs.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as round-off and clamped.
pub const PSD_CLAMP: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(QslError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Self::from_inner(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(QslError::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        let flat: Vec<C64> = rows.iter().flatten().copied().collect();
        Self::from_row_slice(n, m, &flat)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_inner(inner: DMatrix<C64>) -> Result<Self> {
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QslError::NonFiniteEntry);
        }
        Ok(Self(inner))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| c(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self(DMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj()))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        let n = cols.first().map_or(0, Vec::len);
        if cols.is_empty() || cols.iter().any(|v| v.len() != n) {
            return Err(QslError::DimensionMismatch {
                expected: n,
                found: cols.len(),
            });
        }
        Self::from_inner(DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn pauli_x() -> Self {
        Self(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
    }

    pub fn pauli_y() -> Self {
        Self(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        ))
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, z: C64) -> Self {
        Self(&self.0 * z)
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(c(x, 0.0))
    }

    /// `self - shift * I`.
    pub fn shift_diagonal(&self, shift: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows().min(m.ncols()) {
            m[(i, i)] -= shift;
        }
        Self(m)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|H - H^dagger|`; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `(H + H^dagger)/2`, after checking the Hermitian tolerance.
    pub fn symmetrized(&self) -> Result<Self> {
        let defect = self.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(QslError::NonHermitianInput { defect });
        }
        Ok(Self((&self.0 + self.0.adjoint()) * c(0.5, 0.0)))
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols(), v.len(), "dimension mismatch");
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    /// `<u| self |v>`.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        u.iter()
            .zip(self.apply(v))
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Spectral decomposition `H = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the unit eigenvectors, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = self.eigenvectors.inner();
        let mut scaled = v.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= w);
        }
        ComplexMatrix(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| c(x, 0.0))
    }

    /// `exp(-i H s)` from the stored spectrum.
    pub fn exp_i(&self, s: f64) -> ComplexMatrix {
        self.map_spectrum(|lambda| C64::from_polar(1.0, -lambda * s))
    }
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
pub fn eigh(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let sym = h.symmetrized()?;
    let n = sym.rows();
    let eig = sym.0.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        vectors.column_mut(dst).copy_from(&(col / c(norm, 0.0)));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix(vectors),
    })
}

/// `exp(-i H s)` for Hermitian `H`.
pub fn expm_i_hermitian(h: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    Ok(eigh(h)?.exp_i(s))
}

/// Positive square root of a positive semidefinite Hermitian matrix.
pub fn sqrtm_psd(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(rho)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -PSD_CLAMP {
        return Err(QslError::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    Ok(eig.map_spectrum(|x| c(x.max(0.0).sqrt(), 0.0)))
}

/// Tensor product; the left factor indexes the outer (most significant) block.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Vector helpers shared by the state types.
pub(crate) mod vec_ops {
    use super::C64;

    pub fn inner(u: &[C64], v: &[C64]) -> C64 {
        u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(v: &[C64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}
