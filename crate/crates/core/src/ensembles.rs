//! Random Hermitian matrices from the Gaussian Unitary Ensemble, random
//! states, and the block-interacting spin chain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};
use crate::linalg::{c, kron, ComplexMatrix, C64};
use crate::state::{
    basis_from_observable, DensityMatrix, Observable, OrthonormalBasis, PureState, DEFAULT_HBAR,
};

/// Independent random streams derived from one seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Hamiltonian = 0,
    Basis = 1,
    State = 2,
    Optimizer = 3,
}

pub fn seeded_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GueConfig {
    pub dim: usize,
    pub seed: u64,
}

impl GueConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(QslError::InvalidConfig(format!(
                "GUE dimension must be at least 2, got {}",
                self.dim
            )));
        }
        Ok(())
    }
}

/// Draws `H` with density proportional to `exp(-(D/2) Tr H^2)`.
///
/// Diagonal entries are `N(0, 1/D)`; real and imaginary parts of each
/// off-diagonal entry are `N(0, 1/(2D))`.
pub fn sample_gue_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Observable {
    let d = dim as f64;
    let diag = Normal::new(0.0, (1.0 / d).sqrt()).expect("finite sigma");
    let off = Normal::new(0.0, (0.5 / d).sqrt()).expect("finite sigma");
    let mut rows = vec![vec![c(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        rows[i][i] = c(diag.sample(rng), 0.0);
        for j in (i + 1)..dim {
            let z = c(off.sample(rng), off.sample(rng));
            rows[i][j] = z;
            rows[j][i] = z.conj();
        }
    }
    Observable::new(ComplexMatrix::from_rows(&rows).expect("finite entries"))
        .expect("Hermitian by construction")
}

pub fn sample_gue(cfg: GueConfig) -> Result<Observable> {
    cfg.validate()?;
    Ok(sample_gue_with(cfg.dim, &mut seeded_rng(cfg.seed, Stream::Hamiltonian)))
}

/// Eigenbasis of a GUE draw.
pub fn random_basis(dim: usize, seed: u64) -> Result<OrthonormalBasis> {
    basis_from_observable(&sample_gue(GueConfig { dim, seed })?)
}

pub fn random_basis_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> OrthonormalBasis {
    basis_from_observable(&sample_gue_with(dim, rng)).expect("GUE draws are Hermitian")
}

/// Uniformly distributed pure state (normalized complex Gaussian vector).
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let v: Vec<C64> = (0..dim)
        .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    PureState::normalized(v).expect("nonzero with probability one")
}

/// `X X^dagger / Tr(X X^dagger)` with `X` a `dim x rank` complex Gaussian.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let cols: Vec<Vec<C64>> = (0..rank.max(1))
        .map(|_| {
            (0..dim)
                .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                .collect()
        })
        .collect();
    let x = ComplexMatrix::from_columns(&cols).expect("consistent shape");
    let w = &x * &x.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr)).expect("Wishart draws are valid states")
}

fn default_hbar() -> f64 {
    DEFAULT_HBAR
}

/// `H = hbar w0 sum_i (1 - X_i) + hbar w sum_j (1 - S_j)` where `S_j` is the
/// product of `X` over the spins of block `j`. Spins are numbered from 1,
/// spin 1 being the leftmost tensor factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinChainConfig {
    #[serde(alias = "M")]
    pub num_spins: usize,
    pub blocks: Vec<Vec<usize>>,
    pub omega0: f64,
    pub omega: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

pub const MAX_SPINS: usize = 10;

impl SpinChainConfig {
    /// Two spins in a single block with unit frequencies.
    pub fn two_spin_default() -> Self {
        Self {
            num_spins: 2,
            blocks: vec![vec![1, 2]],
            omega0: 1.0,
            omega: 1.0,
            hbar: DEFAULT_HBAR,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.num_spins
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_spins == 0 || self.num_spins > MAX_SPINS {
            return Err(QslError::InvalidConfig(format!(
                "number of spins must be in 1..={MAX_SPINS}, got {}",
                self.num_spins
            )));
        }
        for (name, v) in [("omega0", self.omega0), ("omega", self.omega), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(QslError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        for block in &self.blocks {
            if block.is_empty() {
                return Err(QslError::InvalidConfig("empty spin block".into()));
            }
            for (pos, &i) in block.iter().enumerate() {
                if i == 0 || i > self.num_spins {
                    return Err(QslError::BlockIndexOutOfRange {
                        index: i,
                        num_spins: self.num_spins,
                    });
                }
                if block[..pos].contains(&i) {
                    return Err(QslError::InvalidConfig(format!(
                        "spin {i} repeated within a block"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Bit mask of a block over basis-state indices.
    fn block_mask(&self, block: &[usize]) -> usize {
        block.iter().fold(0, |m, &i| m | self.spin_bit(i))
    }

    fn spin_bit(&self, spin: usize) -> usize {
        1 << (self.num_spins - spin)
    }
}

/// Dense `X` string acting on the given (1-based) spins.
pub fn pauli_x_string(num_spins: usize, spins: &[usize]) -> ComplexMatrix {
    let x = ComplexMatrix::pauli_x();
    let id = ComplexMatrix::identity(2);
    (1..=num_spins).fold(ComplexMatrix::identity(1), |acc, i| {
        kron(&acc, if spins.contains(&i) { &x } else { &id })
    })
}

pub fn spin_chain_hamiltonian(cfg: &SpinChainConfig) -> Result<Observable> {
    cfg.validate()?;
    let dim = cfg.dim();
    let id = ComplexMatrix::identity(dim);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 1..=cfg.num_spins {
        let term = &id - &pauli_x_string(cfg.num_spins, &[i]);
        h = &h + &term.scale_real(cfg.hbar * cfg.omega0);
    }
    for block in &cfg.blocks {
        let term = &id - &pauli_x_string(cfg.num_spins, block);
        h = &h + &term.scale_real(cfg.hbar * cfg.omega);
    }
    Observable::new(h)
}

/// Smallest single-spin purity of a state on `num_spins` qubits.
pub fn min_single_spin_purity(num_spins: usize, psi: &PureState) -> f64 {
    let amps = psi.amplitudes();
    (0..num_spins)
        .map(|q| {
            let bit = 1usize << (num_spins - 1 - q);
            // 2x2 reduced state on spin q
            let mut r = [[c(0.0, 0.0); 2]; 2];
            for (idx, &a) in amps.iter().enumerate() {
                if idx & bit != 0 {
                    continue;
                }
                let b = amps[idx | bit];
                r[0][0] += a * a.conj();
                r[0][1] += a * b.conj();
                r[1][0] += b * a.conj();
                r[1][1] += b * b.conj();
            }
            r.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .fold(1.0, f64::min)
}

/// `(cos wt + i X_mask sin wt)` applied in place.
fn apply_x_rotation(amps: &mut [C64], mask: usize, wt: f64) {
    let (s, co) = wt.sin_cos();
    let old = amps.to_vec();
    for (b, a) in amps.iter_mut().enumerate() {
        *a = old[b] * co + c(0.0, s) * old[b ^ mask];
    }
}

/// Closed-form `exp(-iHt/hbar)|psi0>` for a product initial state.
///
/// All terms of the Hamiltonian are commuting `X` strings, so the propagator
/// factors into single-spin rotations, block rotations, and the phase
/// `exp(-i (M w0 + Q w) t)`.
pub fn spin_chain_evolved_state(cfg: &SpinChainConfig, psi0: &PureState, t: f64) -> Result<PureState> {
    cfg.validate()?;
    if psi0.amplitudes().len() != cfg.dim() {
        return Err(QslError::DimensionMismatch {
            expected: cfg.dim(),
            found: psi0.amplitudes().len(),
        });
    }
    let purity = min_single_spin_purity(cfg.num_spins, psi0);
    if purity < 1.0 - 1e-10 {
        return Err(QslError::NotProductState { purity });
    }
    let mut amps = psi0.amplitudes().to_vec();
    for i in 1..=cfg.num_spins {
        apply_x_rotation(&mut amps, cfg.spin_bit(i), cfg.omega0 * t);
    }
    for block in &cfg.blocks {
        apply_x_rotation(&mut amps, cfg.block_mask(block), cfg.omega * t);
    }
    let phase_rate = cfg.num_spins as f64 * cfg.omega0 + cfg.blocks.len() as f64 * cfg.omega;
    let phase = C64::from_polar(1.0, -phase_rate * t);
    amps.iter_mut().for_each(|a| *a *= phase);
    Ok(PureState::from_raw(amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_pure;
    use crate::linalg::eigh;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gue_is_hermitian_and_deterministic() {
        for seed in 0..5 {
            let a = sample_gue(GueConfig { dim: 4, seed }).unwrap();
            assert!(a.matrix().hermitian_defect() < 1e-12);
            let b = sample_gue(GueConfig { dim: 4, seed }).unwrap();
            assert_eq!(a, b);
        }
        let a = sample_gue(GueConfig { dim: 3, seed: 1 }).unwrap();
        let b = sample_gue(GueConfig { dim: 3, seed: 2 }).unwrap();
        assert_ne!(a, b);
        assert!(sample_gue(GueConfig { dim: 1, seed: 0 }).is_err());
    }

    #[test]
    fn gue_second_moment() {
        // E[Tr H^2] = D * (1/D) + D(D-1) * 2 * (1/(2D)) = D
        let n = 10_000;
        let mut rng = seeded_rng(99, Stream::Hamiltonian);
        let mean: f64 = (0..n)
            .map(|_| {
                let h = sample_gue_with(3, &mut rng);
                (h.matrix() * h.matrix()).trace().re
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 3.0).abs() < 0.1, "{mean}");
    }

    #[test]
    fn gue_eigenvalue_mean_is_zero() {
        let n = 10_000;
        let mut rng = seeded_rng(7, Stream::Hamiltonian);
        let mean: f64 = (0..n)
            .map(|_| eigh(sample_gue_with(3, &mut rng).matrix()).unwrap().eigenvalues.iter().sum::<f64>() / 3.0)
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 0.02, "{mean}");
    }

    #[test]
    fn random_basis_properties() {
        let b = random_basis(5, 3).unwrap();
        assert!(b.gram_defect() < 1e-9);
        assert!(b.completeness_defect() < 1e-9);
        assert_eq!(b, random_basis(5, 3).unwrap());
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = seeded_rng(1, Stream::State);
        let psi = random_pure_state(4, &mut rng);
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
        let rho = random_density_matrix(4, 2, &mut rng);
        assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_spin_hamiltonian() {
        let cfg = SpinChainConfig {
            num_spins: 1,
            blocks: vec![],
            omega0: 0.7,
            omega: 1.0,
            hbar: 1.0,
        };
        let e = eigh(spin_chain_hamiltonian(&cfg).unwrap().matrix()).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.4, epsilon = 1e-12);
    }

    #[test]
    fn two_spin_block_spectrum() {
        // w0(1-a) + w0(1-b) + w(1-ab) for a, b = +-1
        let cfg = SpinChainConfig {
            num_spins: 2,
            blocks: vec![vec![1, 2]],
            omega0: 0.6,
            omega: 1.3,
            hbar: 1.0,
        };
        let h = spin_chain_hamiltonian(&cfg).unwrap();
        assert!(h.matrix().hermitian_defect() < 1e-12);
        let e = eigh(h.matrix()).unwrap();
        let mut expected = vec![0.0, 2.0 * (0.6 + 1.3), 2.0 * (0.6 + 1.3), 4.0 * 0.6];
        expected.sort_by(f64::total_cmp);
        for (x, y) in e.eigenvalues.iter().zip(&expected) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn hamiltonian_commutes_with_block_strings() {
        let cfg = SpinChainConfig {
            num_spins: 4,
            blocks: vec![vec![1, 2], vec![2, 3, 4]],
            omega0: 0.9,
            omega: 0.4,
            hbar: 1.0,
        };
        let h = spin_chain_hamiltonian(&cfg).unwrap();
        for block in &cfg.blocks {
            let s = pauli_x_string(4, block);
            assert!(h.matrix().commutator(&s).max_abs_entry() < 1e-12);
        }
    }

    #[test]
    fn block_validation() {
        let mut cfg = SpinChainConfig::two_spin_default();
        cfg.blocks = vec![vec![1, 3]];
        assert_eq!(
            spin_chain_hamiltonian(&cfg),
            Err(QslError::BlockIndexOutOfRange {
                index: 3,
                num_spins: 2
            })
        );
        cfg.blocks = vec![vec![1, 1]];
        assert!(spin_chain_hamiltonian(&cfg).is_err());
        cfg.blocks = vec![vec![1, 2]];
        cfg.num_spins = 11;
        assert!(spin_chain_hamiltonian(&cfg).is_err());
    }

    #[test]
    fn closed_form_matches_matrix_exponential() {
        let cfg = SpinChainConfig::two_spin_default();
        let h = spin_chain_hamiltonian(&cfg).unwrap();
        let psi0 = PureState::basis(4, 0);
        assert_eq!(spin_chain_evolved_state(&cfg, &psi0, 0.0).unwrap(), psi0);
        for k in 0..50 {
            let t = 0.05 * k as f64;
            let closed = spin_chain_evolved_state(&cfg, &psi0, t).unwrap();
            let exact = evolve_pure(&h, &psi0, t).unwrap();
            let fid = closed.overlap(&exact).unwrap().norm_sqr();
            assert!(fid >= 1.0 - 1e-10, "t={t} fidelity={fid}");
            // the phase prefactor makes the two agree exactly, not just up to phase
            let diff: f64 = closed
                .amplitudes()
                .iter()
                .zip(exact.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-10);
        }
    }

    #[test]
    fn closed_form_general_chain() {
        let cfg = SpinChainConfig {
            num_spins: 3,
            blocks: vec![vec![1, 3], vec![2, 3]],
            omega0: 0.8,
            omega: 1.7,
            hbar: 1.0,
        };
        let h = spin_chain_hamiltonian(&cfg).unwrap();
        // product of three single-qubit states
        let q = [[0.6, 0.8], [1.0, 0.0], [0.28, 0.96]];
        let mut amps = vec![c(0.0, 0.0); 8];
        for (b, a) in amps.iter_mut().enumerate() {
            *a = c(q[0][(b >> 2) & 1] * q[1][(b >> 1) & 1] * q[2][b & 1], 0.0);
        }
        let psi0 = PureState::new(amps).unwrap();
        let closed = spin_chain_evolved_state(&cfg, &psi0, 1.3).unwrap();
        let exact = evolve_pure(&h, &psi0, 1.3).unwrap();
        assert!(closed.overlap(&exact).unwrap().norm_sqr() >= 1.0 - 1e-10);
    }

    #[test]
    fn entangled_input_rejected() {
        let cfg = SpinChainConfig::two_spin_default();
        let bell = PureState::from_real(&[
            std::f64::consts::FRAC_1_SQRT_2,
            0.0,
            0.0,
            std::f64::consts::FRAC_1_SQRT_2,
        ])
        .unwrap();
        assert!(matches!(
            spin_chain_evolved_state(&cfg, &bell, 0.3),
            Err(QslError::NotProductState { .. })
        ));
    }
}
