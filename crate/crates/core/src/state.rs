//! Observables, pure and mixed states, and orthonormal bases.

use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};
use crate::linalg::{c, eigh, vec_ops, ComplexMatrix, C64, PSD_CLAMP};

/// Default reduced Planck constant (natural units).
pub const DEFAULT_HBAR: f64 = 1.0;

const NORM_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const BASIS_TOL: f64 = 1e-9;
const IMAG_TOL: f64 = 1e-8;

/// Hermitian operator. Construction symmetrizes away round-off.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable(ComplexMatrix);

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Ok(Self(matrix.symmetrized()?))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn pauli_x() -> Self {
        Self(ComplexMatrix::pauli_x())
    }

    pub fn pauli_y() -> Self {
        Self(ComplexMatrix::pauli_y())
    }

    pub fn pauli_z() -> Self {
        Self(ComplexMatrix::pauli_z())
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diagonal(diag))
    }

    /// Projector `|psi><psi|`.
    pub fn projector(psi: &PureState) -> Self {
        Self(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()))
    }
}

/// Anything expectation values can be taken in.
pub trait QuantumState {
    fn dim(&self) -> usize;

    /// `Tr(M rho)` for an arbitrary (not necessarily Hermitian) operator.
    fn mean_of(&self, m: &ComplexMatrix) -> C64;

    /// The state as a density matrix.
    fn density(&self) -> ComplexMatrix;
}

/// Unit-norm ket. The global phase carries no meaning.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vec<C64>);

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(QslError::InvalidState("empty ket".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QslError::NonFiniteEntry);
        }
        let norm = vec_ops::norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QslError::InvalidState(format!("ket norm {norm} is not 1")));
        }
        Ok(Self(amplitudes))
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_ops::norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(QslError::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![c(0.0, 0.0); dim];
        v[k] = c(1.0, 0.0);
        Self(v)
    }

    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        Self(amplitudes)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(vec_ops::inner(&self.0, &other.0))
    }

    pub fn norm(&self) -> f64 {
        vec_ops::norm(&self.0)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix(ComplexMatrix::outer(&self.0, &self.0))
    }
}

impl QuantumState for PureState {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn mean_of(&self, m: &ComplexMatrix) -> C64 {
        m.sandwich(&self.0, &self.0)
    }

    fn density(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.0, &self.0)
    }
}

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let m = matrix.symmetrized()?;
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QslError::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = eigh(&m)?.eigenvalues[0];
        if min < -PSD_CLAMP {
            return Err(QslError::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(diag))
    }

    pub(crate) fn from_raw(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl QuantumState for DensityMatrix {
    fn dim(&self) -> usize {
        self.0.rows()
    }

    fn mean_of(&self, m: &ComplexMatrix) -> C64 {
        // Tr(M rho) without forming the product
        let n = self.0.rows();
        let mut acc = c(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += m.get(i, k) * self.0.get(k, i);
            }
        }
        acc
    }

    fn density(&self) -> ComplexMatrix {
        self.0.clone()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(QslError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `<A>` in the given state.
pub fn expectation(a: &Observable, state: &impl QuantumState) -> Result<f64> {
    check_dim(a.dim(), state.dim())?;
    let z = state.mean_of(a.matrix());
    if z.im.abs() > IMAG_TOL {
        return Err(QslError::NonRealExpectation { imag: z.im });
    }
    Ok(z.re)
}

/// `<A^2> - <A>^2`, clamped at zero.
pub fn variance(a: &Observable, state: &impl QuantumState) -> Result<f64> {
    let centered = centered(a, state)?;
    let sq = centered.matrix() * centered.matrix();
    let v = state.mean_of(&sq).re;
    Ok(v.max(0.0))
}

/// `A - <A> I`.
pub fn centered(a: &Observable, state: &impl QuantumState) -> Result<Observable> {
    let mean = expectation(a, state)?;
    Ok(Observable(a.matrix().shift_diagonal(mean)))
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    m.inner().iter().map(|z| z.norm_sqr()).sum()
}

/// Complete orthonormal set of kets.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis(Vec<Vec<C64>>);

impl OrthonormalBasis {
    /// Validates orthonormality and completeness.
    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(QslError::InvalidBasis("no vectors".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(QslError::InvalidBasis(format!(
                "{d} vectors of length {}; a complete basis needs square shape",
                v.len()
            )));
        }
        let basis = Self(vectors);
        let gram = basis.gram_defect();
        if gram > BASIS_TOL {
            return Err(QslError::InvalidBasis(format!(
                "Gram matrix deviates from identity by {gram:.3e}"
            )));
        }
        let completeness = basis.completeness_defect();
        if completeness > BASIS_TOL {
            return Err(QslError::InvalidBasis(format!(
                "sum of projectors deviates from identity by {completeness:.3e}"
            )));
        }
        Ok(basis)
    }

    /// Columns of a unitary matrix.
    pub fn from_unitary_columns(u: &ComplexMatrix) -> Result<Self> {
        Self::new((0..u.cols()).map(|j| u.column(j)).collect())
    }

    /// Computational basis `{|0>, ..., |d-1>}`.
    pub fn standard(dim: usize) -> Self {
        Self::from_unitary_columns(&ComplexMatrix::identity(dim)).expect("identity is unitary")
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.0
    }

    pub fn vector(&self, n: usize) -> &[C64] {
        &self.0[n]
    }

    /// Matrix whose columns are the basis vectors.
    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.0).expect("validated basis")
    }

    pub fn permuted(&self, order: &[usize]) -> Self {
        Self(order.iter().map(|&k| self.0[k].clone()).collect())
    }

    /// Max entry of `|G - I|`, G the Gram matrix.
    pub fn gram_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (m, u) in self.0.iter().enumerate() {
            for (n, v) in self.0.iter().enumerate() {
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((vec_ops::inner(u, v) - c(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Max entry of `|sum_n |n><n| - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for v in &self.0 {
            sum = &sum + &ComplexMatrix::outer(v, v);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }
}

/// Eigenbasis of a Hermitian operator, in ascending eigenvalue order.
pub fn basis_from_observable(g: &Observable) -> Result<OrthonormalBasis> {
    let eig = eigh(g.matrix())?;
    OrthonormalBasis::from_unitary_columns(&eig.eigenvectors)
}

/// `{"dim": d, "re": [[..]], "im": [[..]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| f(&m.get(i, j))).collect())
                .collect()
        };
        Self {
            dim: m.rows(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let shape_ok = self.re.len() == self.dim
            && self.im.len() == self.dim
            && self
                .re
                .iter()
                .chain(&self.im)
                .all(|row| row.len() == self.dim);
        if !shape_ok {
            return Err(QslError::InvalidConfig(format!(
                "matrix JSON does not have shape {0}x{0}",
                self.dim
            )));
        }
        let rows: Vec<Vec<C64>> = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| c(a, b)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows)
    }
}

/// `{"re": [..], "im": [..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KetJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl KetJson {
    pub fn from_state(psi: &PureState) -> Self {
        Self {
            re: psi.amplitudes().iter().map(|z| z.re).collect(),
            im: psi.amplitudes().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_state(&self) -> Result<PureState> {
        if self.re.len() != self.im.len() {
            return Err(QslError::DimensionMismatch {
                expected: self.re.len(),
                found: self.im.len(),
            });
        }
        PureState::new(self.re.iter().zip(&self.im).map(|(&a, &b)| c(a, b)).collect())
    }
}
