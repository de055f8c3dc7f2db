//! Unitary evolution under time-independent Hamiltonians, Bargmann angles,
//! and uniformly sampled trajectories.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QslError, Result};
use crate::linalg::{eigh, ComplexMatrix, EigenDecomposition};
use crate::state::{
    purity, variance, DensityMatrix, Observable, PureState, QuantumState, DEFAULT_HBAR,
};

/// `exp(-i H t / hbar)` for all `t`, from one eigendecomposition of `H`.
#[derive(Clone, Debug)]
pub struct Propagator {
    eig: EigenDecomposition,
    hbar: f64,
}

impl Propagator {
    pub fn new(h: &Observable, hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(QslError::InvalidConfig(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self {
            eig: eigh(h.matrix())?,
            hbar,
        })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        if t == 0.0 {
            return ComplexMatrix::identity(self.dim());
        }
        self.eig.exp_i(t / self.hbar)
    }
}

/// States that evolve unitarily and have a Bargmann angle.
pub trait Evolvable: QuantumState + Clone + Send + Sync {
    fn evolve_with(&self, u: &ComplexMatrix) -> Self;

    /// Geodesic angle between `self` (initial) and `other`, in `[0, pi]`.
    fn bargmann_angle_to(&self, other: &Self) -> Result<f64>;

    /// The quantity whose arccos is half the Bargmann angle, in `[0, 1]`.
    fn fidelity_root(&self, other: &Self) -> Result<f64>;
}

impl Evolvable for PureState {
    fn evolve_with(&self, u: &ComplexMatrix) -> Self {
        PureState::from_raw(u.apply(self.amplitudes()))
    }

    fn bargmann_angle_to(&self, other: &Self) -> Result<f64> {
        bargmann_angle_pure(self, other)
    }

    fn fidelity_root(&self, other: &Self) -> Result<f64> {
        Ok(self.overlap(other)?.norm().clamp(0.0, 1.0))
    }
}

impl Evolvable for DensityMatrix {
    fn evolve_with(&self, u: &ComplexMatrix) -> Self {
        let m = &(u * self.matrix()) * &u.adjoint();
        DensityMatrix::from_raw(m)
    }

    fn bargmann_angle_to(&self, other: &Self) -> Result<f64> {
        bargmann_angle_mixed(self, other)
    }

    fn fidelity_root(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        let ratio = overlap_trace(self, other) / purity(self);
        Ok(ratio.clamp(0.0, 1.0).sqrt())
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(QslError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `Tr(rho sigma)`.
pub fn overlap_trace(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    rho.mean_of(sigma.matrix()).re
}

/// `exp(-i H t) |psi0>` with `hbar = 1`.
pub fn evolve_pure(h: &Observable, psi0: &PureState, t: f64) -> Result<PureState> {
    check_dim(h.dim(), psi0.dim())?;
    let p = Propagator::new(h, DEFAULT_HBAR)?;
    Ok(psi0.evolve_with(&p.unitary(t)))
}

/// `exp(-i H t) rho0 exp(i H t)` with `hbar = 1`.
pub fn evolve_mixed(h: &Observable, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_dim(h.dim(), rho0.dim())?;
    let p = Propagator::new(h, DEFAULT_HBAR)?;
    Ok(rho0.evolve_with(&p.unitary(t)))
}

/// `2 arccos |<psi0|psit>|`.
pub fn bargmann_angle_pure(psi0: &PureState, psit: &PureState) -> Result<f64> {
    let overlap = psi0.overlap(psit)?.norm().clamp(0.0, 1.0);
    Ok(2.0 * overlap.acos())
}

/// `2 arccos sqrt(Tr(rho0 rhot) / Tr(rho0^2))`.
pub fn bargmann_angle_mixed(rho0: &DensityMatrix, rhot: &DensityMatrix) -> Result<f64> {
    check_dim(rho0.dim(), rhot.dim())?;
    let ratio = (overlap_trace(rho0, rhot) / purity(rho0)).clamp(0.0, 1.0);
    Ok(2.0 * ratio.sqrt().acos())
}

/// Uniformly sampled evolution on `[0, t_max]`.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub hamiltonian: Observable,
    pub hbar: f64,
    pub times: Vec<f64>,
    pub states: Vec<S>,
    /// Bargmann angle of each sample relative to the first.
    pub s0: Vec<f64>,
    /// `cos(s0/2)` as computed from the states.
    pub overlap: Vec<f64>,
    /// Energy spread evaluated at every sample; constant up to round-off.
    pub delta_h_samples: Vec<f64>,
    pub delta_h: f64,
    /// Index of the first interior minimum of the overlap, if any. Samples
    /// after it lie outside the range the speed-limit derivation covers.
    pub first_overlap_minimum: Option<usize>,
}

impl<S: Evolvable> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> &S {
        &self.states[0]
    }

    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn is_valid_at(&self, k: usize) -> bool {
        self.first_overlap_minimum.is_none_or(|m| k <= m)
    }

    pub fn is_validity_clean(&self) -> bool {
        self.first_overlap_minimum.is_none()
    }

    /// Time of the flagged minimum, if any.
    pub fn flagged_time(&self) -> Option<f64> {
        self.first_overlap_minimum.map(|k| self.times[k])
    }

    /// Rows `t, s0, overlap, delta_h`.
    pub fn csv_rows(&self) -> Vec<TrajectoryRow> {
        (0..self.len())
            .map(|k| TrajectoryRow {
                t: self.times[k],
                s0: self.s0[k],
                overlap: self.overlap[k],
                delta_h: self.delta_h_samples[k],
            })
            .collect()
    }

    /// CSV with header `t,s0,overlap,delta_h`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,s0,overlap,delta_h\n");
        for r in self.csv_rows() {
            out.push_str(&format!(
                "{:.11e},{:.11e},{:.11e},{:.11e}\n",
                r.t, r.s0, r.overlap, r.delta_h
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub s0: f64,
    pub overlap: f64,
    pub delta_h: f64,
}

/// Evenly spaced grid `{0, t_max/(steps-1), ..., t_max}`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(QslError::InvalidConfig(format!("t_max must be positive, got {t_max}")));
    }
    if steps < 2 {
        return Err(QslError::InvalidConfig(format!("steps must be at least 2, got {steps}")));
    }
    let n = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| if k == steps - 1 { t_max } else { t_max * k as f64 / n })
        .collect())
}

/// Evolves `state0` under `h` on a uniform grid, `hbar = 1`.
pub fn sample_trajectory<S: Evolvable>(
    h: &Observable,
    state0: &S,
    t_max: f64,
    steps: usize,
) -> Result<Trajectory<S>> {
    sample_trajectory_with_hbar(h, state0, t_max, steps, DEFAULT_HBAR)
}

pub fn sample_trajectory_with_hbar<S: Evolvable>(
    h: &Observable,
    state0: &S,
    t_max: f64,
    steps: usize,
    hbar: f64,
) -> Result<Trajectory<S>> {
    let times = uniform_grid(t_max, steps)?;
    trajectory_on_grid(h, state0, times, hbar)
}

/// Evolves `state0` onto an arbitrary ascending grid starting at 0.
pub fn trajectory_on_grid<S: Evolvable>(
    h: &Observable,
    state0: &S,
    times: Vec<f64>,
    hbar: f64,
) -> Result<Trajectory<S>> {
    check_dim(h.dim(), state0.dim())?;
    if times.first() != Some(&0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QslError::InvalidConfig(
            "time grid must start at 0 and be strictly ascending".into(),
        ));
    }
    let prop = Propagator::new(h, hbar)?;
    let states: Vec<S> = times
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                state0.clone()
            } else {
                state0.evolve_with(&prop.unitary(t))
            }
        })
        .collect();
    trajectory_from_states(h, times, states, hbar)
}

/// Assembles a trajectory from states computed elsewhere (e.g. a closed
/// form). `states[0]` is the reference state.
pub fn trajectory_from_states<S: Evolvable>(
    h: &Observable,
    times: Vec<f64>,
    states: Vec<S>,
    hbar: f64,
) -> Result<Trajectory<S>> {
    if times.len() != states.len() || times.len() < 2 {
        return Err(QslError::InvalidConfig(format!(
            "need matching times and states (at least 2), got {} and {}",
            times.len(),
            states.len()
        )));
    }
    if times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QslError::InvalidConfig(
            "time grid must start at 0 and be strictly ascending".into(),
        ));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(QslError::InvalidConfig(format!("hbar must be positive, got {hbar}")));
    }
    let state0 = &states[0];
    check_dim(h.dim(), state0.dim())?;

    let overlap = states
        .iter()
        .map(|s| state0.fidelity_root(s))
        .collect::<Result<Vec<_>>>()?;
    let s0 = overlap.iter().map(|o| 2.0 * o.acos()).collect();
    let delta_h_samples = states
        .iter()
        .map(|s| variance(h, s).map(f64::sqrt))
        .collect::<Result<Vec<_>>>()?;

    let first_overlap_minimum = (1..overlap.len().saturating_sub(1))
        .find(|&k| overlap[k] <= overlap[k - 1] && overlap[k + 1] > overlap[k]);

    Ok(Trajectory {
        hamiltonian: h.clone(),
        hbar,
        times,
        states,
        s0,
        overlap,
        delta_h: delta_h_samples[0],
        delta_h_samples,
        first_overlap_minimum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn ket0() -> PureState {
        PureState::basis(2, 0)
    }

    #[test]
    fn trajectory_csv_shape() {
        let traj = sample_trajectory(&Observable::pauli_x(), &ket0(), 1.0, 5).unwrap();
        let csv = traj.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,s0,overlap,delta_h");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0.00000000000e0,0.00000000000e0,1.00000000000e0,"));
    }

    #[test]
    fn evolve_pure_examples() {
        let h = Observable::pauli_x();
        let same = evolve_pure(&h, &ket0(), 0.0).unwrap();
        assert_eq!(same.amplitudes(), ket0().amplitudes());

        for &t in &[0.3, 1.1, 2.9] {
            let psi = evolve_pure(&h, &ket0(), t).unwrap();
            assert!((psi.amplitudes()[0] - c(t.cos(), 0.0)).norm() < 1e-12);
            assert!((psi.amplitudes()[1] - c(0.0, -t.sin())).norm() < 1e-12);
        }

        let plus = PureState::from_real(&[std::f64::consts::FRAC_1_SQRT_2; 2]).unwrap();
        let out = evolve_pure(&h, &plus, 0.8).unwrap();
        assert_abs_diff_eq!(plus.overlap(&out).unwrap().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn evolve_mixed_examples() {
        let h = Observable::pauli_x();
        let rho0 = DensityMatrix::from_real_diagonal(&[0.8, 0.2]).unwrap();
        let same = evolve_mixed(&h, &rho0, 0.0).unwrap();
        assert!(same.matrix().max_abs_diff(rho0.matrix()) < 1e-15);

        let mixed = DensityMatrix::maximally_mixed(2);
        let out = evolve_mixed(&h, &mixed, 1.7).unwrap();
        assert!(out.matrix().max_abs_diff(mixed.matrix()) < 1e-12);

        let psi0 = PureState::from_real(&[0.6, 0.8]).unwrap();
        let lifted = evolve_mixed(&h, &psi0.to_density(), 0.9).unwrap();
        let direct = evolve_pure(&h, &psi0, 0.9).unwrap().to_density();
        assert!(lifted.matrix().max_abs_diff(direct.matrix()) < 1e-9);
    }

    #[test]
    fn bargmann_pure_examples() {
        assert_abs_diff_eq!(bargmann_angle_pure(&ket0(), &ket0()).unwrap(), 0.0);
        assert_abs_diff_eq!(bargmann_angle_pure(&ket0(), &PureState::basis(2, 1)).unwrap(), PI);
        for &t in &[0.2, 0.9, 1.5] {
            let psi = evolve_pure(&Observable::pauli_x(), &ket0(), t).unwrap();
            assert_abs_diff_eq!(bargmann_angle_pure(&ket0(), &psi).unwrap(), 2.0 * t, epsilon = 1e-8);
        }
    }

    #[test]
    fn bargmann_mixed_examples() {
        let rho0 = DensityMatrix::from_real_diagonal(&[0.8, 0.2]).unwrap();
        assert_abs_diff_eq!(bargmann_angle_mixed(&rho0, &rho0).unwrap(), 0.0);

        let psi0 = PureState::from_real(&[0.6, 0.8]).unwrap();
        let psit = evolve_pure(&Observable::pauli_x(), &psi0, 0.4).unwrap();
        let pure = bargmann_angle_pure(&psi0, &psit).unwrap();
        let mixed = bargmann_angle_mixed(&psi0.to_density(), &psit.to_density()).unwrap();
        assert_abs_diff_eq!(pure, mixed, epsilon = 1e-9);

        // sigma_x for a quarter period swaps the populations:
        // rho_t = diag(0.2, 0.8), Tr(rho0 rho_t) = 0.32, Tr(rho0^2) = 0.68.
        let rhot = evolve_mixed(&Observable::pauli_x(), &rho0, PI / 2.0).unwrap();
        let expected = 2.0 * (0.32f64 / 0.68).sqrt().acos();
        assert_abs_diff_eq!(bargmann_angle_mixed(&rho0, &rhot).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn trajectory_grid_and_closed_form() {
        let traj = sample_trajectory(&Observable::pauli_x(), &ket0(), 1.0, 2).unwrap();
        assert_eq!(traj.times, vec![0.0, 1.0]);

        let traj = sample_trajectory(&Observable::pauli_x(), &ket0(), 1.0, 101).unwrap();
        assert_eq!(traj.len(), 101);
        for (t, s) in traj.times.iter().zip(&traj.s0) {
            assert_abs_diff_eq!(*s, 2.0 * t, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(traj.s0[0], 0.0, epsilon = 1e-9);
        for d in &traj.delta_h_samples {
            assert_abs_diff_eq!(*d, traj.delta_h, epsilon = 1e-9);
        }
        assert!(traj.is_validity_clean());
    }

    #[test]
    fn trajectory_flags_first_overlap_minimum() {
        // overlap cos t reaches zero at pi/2 and then grows again
        let traj = sample_trajectory(&Observable::pauli_x(), &ket0(), 3.0, 301).unwrap();
        let k = traj.first_overlap_minimum.expect("flag");
        assert_abs_diff_eq!(traj.times[k], PI / 2.0, epsilon = 0.011);
        assert!(traj.is_valid_at(k));
        assert!(!traj.is_valid_at(k + 1));
    }

    #[test]
    fn grid_validation() {
        assert!(uniform_grid(0.0, 10).is_err());
        assert!(uniform_grid(1.0, 1).is_err());
        let g = uniform_grid(2.0, 5).unwrap();
        assert_eq!(g, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(Propagator::new(&Observable::pauli_x(), 0.0).is_err());
    }

    #[test]
    fn hbar_rescales_time() {
        let h = Observable::pauli_x();
        let a = sample_trajectory_with_hbar(&h, &ket0(), 1.0, 11, 2.0).unwrap();
        let b = sample_trajectory_with_hbar(&h, &ket0(), 0.5, 11, 1.0).unwrap();
        for (x, y) in a.s0.iter().zip(&b.s0) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }
}
