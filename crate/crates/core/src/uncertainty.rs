//! Variance-product uncertainty bounds.
//!
//! For observables `A`, `B`, a state and a complete orthonormal basis
//! `{|psi_n>}`, every bound here sits in the chain
//!
//! ```text
//! dA dB >= sum_n |<A' P_n B'>|  >=  |<A' B'>|  >=  |<[A, B]>| / 2
//! ```
//!
//! where `A' = A - <A>` and `P_n = |psi_n><psi_n|`. For mixed states the
//! basis-resolved terms become `sqrt|<psi_n|A' rho A'|psi_n> <psi_n|B' rho B'|psi_n>|`,
//! i.e. `sqrt|Tr(A' rho A' B'_n rho B'_n^dagger)|` for `B'_n = P_n B'`. The gap
//! between the basis-resolved sum and the cross term is the correction `K`
//! that feeds the speed limits.

use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::state::{
    centered, variance, DensityMatrix, Observable, OrthonormalBasis, PureState, QuantumState,
};

/// Round-off window for quantities that are nonnegative in exact arithmetic.
pub const NONNEG_SLACK: f64 = 1e-9;

/// Which side of `B'` the basis projector sits on in `B'_n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    /// `B'_n = |psi_n><psi_n| B'`
    #[default]
    Left,
    /// `B'_n = B' |psi_n><psi_n|`; in the mixed bound the adjoint moves to
    /// the other side, `Tr(A' rho A' B'_n^dagger rho B'_n)`.
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub delta_a: f64,
    pub delta_b: f64,
    pub tighter_bound: f64,
    pub rs_bound: f64,
    pub cross_term: f64,
    pub correction_k: f64,
}

impl UncertaintyReport {
    /// Slacks of `dA dB >= tighter_bound` and `tighter_bound >= cross_term`.
    pub fn chain_slacks(&self) -> [f64; 2] {
        [
            self.delta_a * self.delta_b - self.tighter_bound,
            self.tighter_bound - self.cross_term,
        ]
    }
}

/// Clamps `[-NONNEG_SLACK, 0)` to zero and rejects anything lower.
pub(crate) fn clamp_nonneg(quantity: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NONNEG_SLACK {
        Ok(0.0)
    } else {
        Err(QslError::NegativeBeyondRoundoff { quantity, value })
    }
}

fn check_dims(a: &Observable, b: &Observable, dim: usize) -> Result<()> {
    for d in [a.dim(), b.dim()] {
        if d != dim {
            return Err(QslError::DimensionMismatch {
                expected: dim,
                found: d,
            });
        }
    }
    Ok(())
}

fn check_basis(basis: &OrthonormalBasis, dim: usize) -> Result<()> {
    if basis.dim() != dim {
        return Err(QslError::DimensionMismatch {
            expected: dim,
            found: basis.dim(),
        });
    }
    Ok(())
}

/// `<[A, B]>`, purely imaginary for Hermitian `A`, `B`.
pub fn commutator_mean(a: &Observable, b: &Observable, state: &impl QuantumState) -> Result<C64> {
    check_dims(a, b, state.dim())?;
    Ok(state.mean_of(&a.matrix().commutator(b.matrix())))
}

/// `sqrt(|<[A,B]>/2|^2 + |<{A,B}>/2 - <A><B>|^2)`.
pub fn robertson_schrodinger_bound(
    a: &Observable,
    b: &Observable,
    state: &impl QuantumState,
) -> Result<f64> {
    check_dims(a, b, state.dim())?;
    let comm = state.mean_of(&a.matrix().commutator(b.matrix()));
    let anti = state.mean_of(&a.matrix().anticommutator(b.matrix()));
    let mean_a = state.mean_of(a.matrix());
    let mean_b = state.mean_of(b.matrix());
    let cov = anti * 0.5 - mean_a * mean_b;
    Ok(((comm * 0.5).norm_sqr() + cov.norm_sqr()).sqrt())
}

/// `|<A' B'>|`, equivalently `|Tr(A' rho B')|` for mixed states.
pub fn cross_term(a: &Observable, b: &Observable, state: &impl QuantumState) -> Result<f64> {
    check_dims(a, b, state.dim())?;
    let a_bar = centered(a, state)?;
    let b_bar = centered(b, state)?;
    Ok(state.mean_of(&(a_bar.matrix() * b_bar.matrix())).norm())
}

/// Residual of `|<A'B'>|^2 = |<[A,B]>|^2/4 + |<{A,B}>/2 - k <A><B>|^2` for the
/// given coefficient `k`. It vanishes for `k = 1`; other coefficients are
/// kept for diagnosing alternative forms of the identity.
pub fn anticommutator_identity_residual(
    a: &Observable,
    b: &Observable,
    state: &impl QuantumState,
    coefficient: f64,
) -> Result<f64> {
    let cross = cross_term(a, b, state)?;
    let comm = commutator_mean(a, b, state)?;
    let anti = state.mean_of(&a.matrix().anticommutator(b.matrix()));
    let mean_a = state.mean_of(a.matrix());
    let mean_b = state.mean_of(b.matrix());
    let rhs = 0.25 * comm.norm_sqr() + (anti * 0.5 - mean_a * mean_b * coefficient).norm_sqr();
    Ok(cross * cross - rhs)
}

/// Terms `<Psi| A' B'_n |Psi>` of the pure-state basis-resolved sum.
fn pure_terms(
    a_bar: &ComplexMatrix,
    b_bar: &ComplexMatrix,
    psi: &PureState,
    basis: &OrthonormalBasis,
    projection: Projection,
) -> Vec<C64> {
    let amps = psi.amplitudes();
    let a_psi = a_bar.apply(amps);
    match projection {
        Projection::Left => {
            // <A'Psi|n><n|B'Psi>
            let b_psi = b_bar.apply(amps);
            basis
                .vectors()
                .iter()
                .map(|v| inner(&a_psi, v) * inner(v, &b_psi))
                .collect()
        }
        Projection::Right => {
            // <A'Psi| B' |n><n|Psi>
            let ba_psi = b_bar.apply(&a_psi);
            basis
                .vectors()
                .iter()
                .map(|v| inner(&ba_psi, v) * inner(v, amps))
                .collect()
        }
    }
}

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
}

/// `sum_n |<Psi| A' B'_n |Psi>|` with left-projected `B'_n`.
pub fn tighter_bound_pure(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    basis: &OrthonormalBasis,
) -> Result<f64> {
    tighter_bound_pure_with(a, b, psi, basis, Projection::Left)
}

pub fn tighter_bound_pure_with(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    basis: &OrthonormalBasis,
    projection: Projection,
) -> Result<f64> {
    check_dims(a, b, psi.dim())?;
    check_basis(basis, psi.dim())?;
    let a_bar = centered(a, psi)?;
    let b_bar = centered(b, psi)?;
    Ok(pure_terms(a_bar.matrix(), b_bar.matrix(), psi, basis, projection)
        .iter()
        .map(|z| z.norm())
        .sum())
}

/// `A' rho A'`, positive semidefinite for any Hermitian `A`.
pub fn f_operator(a: &Observable, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let a_bar = centered(a, rho)?;
    Ok(&(a_bar.matrix() * rho.matrix()) * a_bar.matrix())
}

/// `sum_n sqrt|Tr(A' rho A' B'_n rho B'_n)|` with left-projected `B'_n`.
pub fn tighter_bound_mixed(
    a: &Observable,
    b: &Observable,
    rho: &DensityMatrix,
    basis: &OrthonormalBasis,
) -> Result<f64> {
    tighter_bound_mixed_with(a, b, rho, basis, Projection::Left)
}

pub fn tighter_bound_mixed_with(
    a: &Observable,
    b: &Observable,
    rho: &DensityMatrix,
    basis: &OrthonormalBasis,
    projection: Projection,
) -> Result<f64> {
    check_dims(a, b, rho.dim())?;
    check_basis(basis, rho.dim())?;
    let a_bar = centered(a, rho)?;
    let b_bar = centered(b, rho)?;
    let r = rho.matrix();
    let f = &(a_bar.matrix() * r) * a_bar.matrix();
    let terms: Vec<C64> = match projection {
        // Tr(f P_n B' rho B' P_n) = <n|f|n> <n|B' rho B'|n>
        Projection::Left => {
            let g = &(b_bar.matrix() * r) * b_bar.matrix();
            basis
                .vectors()
                .iter()
                .map(|v| f.sandwich(v, v) * g.sandwich(v, v))
                .collect()
        }
        // B'_n = B' P_n enters as Tr(f B'_n^dagger rho B'_n); built explicitly
        Projection::Right => basis
            .vectors()
            .iter()
            .map(|v| {
                let bn = b_bar.matrix() * &ComplexMatrix::outer(v, v);
                (&f * &(&(&bn.adjoint() * r) * &bn)).trace()
            })
            .collect(),
    };
    Ok(terms.iter().map(|z| z.norm().sqrt()).sum())
}

/// `K = sum_n |<A' B'_n>| - |<A' B'>|` for a pure state.
pub fn correction_k_pure(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    basis: &OrthonormalBasis,
) -> Result<f64> {
    let tighter = tighter_bound_pure(a, b, psi, basis)?;
    let cross = cross_term(a, b, psi)?;
    clamp_nonneg("K", tighter - cross)
}

/// `K = sum_n sqrt|Tr(A' rho A' B'_n rho B'_n)| - |Tr(A' rho B')|`.
pub fn correction_k_mixed(
    a: &Observable,
    b: &Observable,
    rho: &DensityMatrix,
    basis: &OrthonormalBasis,
) -> Result<f64> {
    let tighter = tighter_bound_mixed(a, b, rho, basis)?;
    let cross = cross_term(a, b, rho)?;
    clamp_nonneg("K", tighter - cross)
}

/// All bounds for a pure state.
pub fn report_pure(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    basis: &OrthonormalBasis,
) -> Result<UncertaintyReport> {
    let tighter_bound = tighter_bound_pure(a, b, psi, basis)?;
    let cross = cross_term(a, b, psi)?;
    Ok(UncertaintyReport {
        delta_a: variance(a, psi)?.sqrt(),
        delta_b: variance(b, psi)?.sqrt(),
        tighter_bound,
        rs_bound: robertson_schrodinger_bound(a, b, psi)?,
        cross_term: cross,
        correction_k: clamp_nonneg("K", tighter_bound - cross)?,
    })
}

/// All bounds for a mixed state.
pub fn report_mixed(
    a: &Observable,
    b: &Observable,
    rho: &DensityMatrix,
    basis: &OrthonormalBasis,
) -> Result<UncertaintyReport> {
    let tighter_bound = tighter_bound_mixed(a, b, rho, basis)?;
    let cross = cross_term(a, b, rho)?;
    Ok(UncertaintyReport {
        delta_a: variance(a, rho)?.sqrt(),
        delta_b: variance(b, rho)?.sqrt(),
        tighter_bound,
        rs_bound: robertson_schrodinger_bound(a, b, rho)?,
        cross_term: cross,
        correction_k: clamp_nonneg("K", tighter_bound - cross)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::state::basis_from_observable;
    use approx::assert_abs_diff_eq;

    fn ket0() -> PureState {
        PureState::basis(2, 0)
    }

    fn ket_plus() -> PureState {
        PureState::from_real(&[std::f64::consts::FRAC_1_SQRT_2; 2]).unwrap()
    }

    fn sx() -> Observable {
        Observable::pauli_x()
    }

    fn sy() -> Observable {
        Observable::pauli_y()
    }

    #[test]
    fn rs_bound_examples() {
        assert_abs_diff_eq!(robertson_schrodinger_bound(&sx(), &sy(), &ket0()).unwrap(), 1.0, epsilon = 1e-14);
        let a = Observable::from_real_diagonal(&[1.0, 2.0]);
        let b = Observable::from_real_diagonal(&[-3.0, 0.5]);
        assert_abs_diff_eq!(robertson_schrodinger_bound(&a, &b, &ket0()).unwrap(), 0.0);
        assert_abs_diff_eq!(robertson_schrodinger_bound(&sx(), &sy(), &ket_plus()).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(variance(&sx(), &ket_plus()).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cross_term_examples() {
        assert_abs_diff_eq!(cross_term(&sx(), &sy(), &ket0()).unwrap(), 1.0, epsilon = 1e-14);
        let psi = PureState::from_real(&[0.6, 0.8]).unwrap();
        let h = Observable::new(ComplexMatrix::from_real_rows(&[vec![0.3, 1.0], vec![1.0, -0.7]]).unwrap()).unwrap();
        assert_abs_diff_eq!(cross_term(&h, &h, &psi).unwrap(), variance(&h, &psi).unwrap(), epsilon = 1e-14);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(cross_term(&sx(), &sy(), &mixed).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn tighter_pure_examples() {
        let basis = basis_from_observable(&Observable::new(
            ComplexMatrix::from_rows(&[
                vec![c(0.2, 0.0), c(0.3, -0.4)],
                vec![c(0.3, 0.4), c(-0.9, 0.0)],
            ])
            .unwrap(),
        ).unwrap())
        .unwrap();
        assert_abs_diff_eq!(tighter_bound_pure(&sx(), &sy(), &ket0(), &basis).unwrap(), 1.0, epsilon = 1e-12);
        let std = OrthonormalBasis::standard(2);
        assert_abs_diff_eq!(tighter_bound_pure(&sx(), &sy(), &ket0(), &std).unwrap(), 1.0, epsilon = 1e-14);
        let z = Observable::pauli_z();
        assert_abs_diff_eq!(tighter_bound_pure(&z, &z, &ket0(), &std).unwrap(), 0.0);
    }

    #[test]
    fn tighter_mixed_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let y_basis = basis_from_observable(&sy()).unwrap();
        assert_abs_diff_eq!(tighter_bound_mixed(&sx(), &sy(), &mixed, &y_basis).unwrap(), 1.0, epsilon = 1e-12);
        // <n|f|n> = <n|g|n> = 1/2 in the standard basis as well, so the sum
        // is 1 here too; this is the reading that reduces to the pure bound.
        let std = OrthonormalBasis::standard(2);
        assert_abs_diff_eq!(tighter_bound_mixed(&sx(), &sy(), &mixed, &std).unwrap(), 1.0, epsilon = 1e-14);
        let pure = ket0().to_density();
        assert_abs_diff_eq!(tighter_bound_mixed(&sx(), &sy(), &pure, &std).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn correction_examples() {
        let std = OrthonormalBasis::standard(2);
        assert_abs_diff_eq!(correction_k_pure(&sx(), &sy(), &ket0(), &std).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(correction_k_mixed(&sx(), &sy(), &ket0().to_density(), &std).unwrap(), 0.0, epsilon = 1e-14);

        // projector onto the state itself annihilates after centering
        let psi = PureState::from_real(&[0.6, 0.8]).unwrap();
        let a = Observable::projector(&psi);
        let h = Observable::new(ComplexMatrix::from_real_rows(&[vec![0.3, 1.0], vec![1.0, -0.7]]).unwrap()).unwrap();
        assert_abs_diff_eq!(correction_k_pure(&a, &h, &psi, &std).unwrap(), 0.0, epsilon = 1e-14);

        let rho = DensityMatrix::from_real_diagonal(&[0.3, 0.7]).unwrap();
        let a = Observable::from_real_diagonal(&[1.0, -2.0]);
        let b = Observable::from_real_diagonal(&[0.4, 0.1]);
        assert_abs_diff_eq!(correction_k_mixed(&a, &b, &rho, &std).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn dimension_and_basis_errors() {
        let std3 = OrthonormalBasis::standard(3);
        assert!(matches!(
            tighter_bound_pure(&sx(), &sy(), &ket0(), &std3),
            Err(QslError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            cross_term(&Observable::identity(3), &sy(), &ket0()),
            Err(QslError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn clamp_policy() {
        assert_eq!(clamp_nonneg("x", -5e-10), Ok(0.0));
        assert_eq!(clamp_nonneg("x", 0.25), Ok(0.25));
        assert!(clamp_nonneg("x", -1e-6).is_err());
    }

    #[test]
    fn report_serializes_six_fields() {
        let r = report_pure(&sx(), &sy(), &ket0(), &OrthonormalBasis::standard(2)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 6);
        for k in ["delta_a", "delta_b", "tighter_bound", "rs_bound", "cross_term", "correction_k"] {
            assert!(keys.contains(&k));
        }
    }
}
