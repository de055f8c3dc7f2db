//! Quantum speed limits: Mandelstam-Tamm, the combined orthogonal bound,
//! and the tighter bounds that add a basis-dependent correction integral.
//!
//! For a pure state the tighter bound evaluated at time `tau` is
//!
//! ```text
//! hbar s0(tau) / (2 dH)  +  (2 / dH) * int_0^tau K(t) / sin s0(t) dt
//! ```
//!
//! with `A = |Psi(0)><Psi(0)|`, `B = H`. For a mixed state, `A = rho(0)` and
//!
//! ```text
//! hbar (acos sqrt Tr(rho0 rho_tau) - acos sqrt Tr(rho0^2)) / dH
//!   + 1/(sqrt(P) dH) * int_0^tau K(t) / (cos(s0/2) sqrt(1 - P cos^2(s0/2))) dt
//! ```
//!
//! where `P = Tr(rho0^2)`. Both are lower bounds on `tau` wherever the
//! trajectory has not yet passed its first overlap minimum.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{overlap_trace, sample_trajectory_with_hbar, Evolvable, Trajectory};
use crate::ensembles::{random_basis_with, sample_gue_with, seeded_rng, Stream};
use crate::error::{QslError, Result};
use crate::linalg::{eigh, ComplexMatrix, C64};
use crate::quadrature::{self, QuadratureScheme};
use crate::state::{
    expectation, purity, variance, DensityMatrix, Observable, OrthonormalBasis, PureState,
    QuantumState,
};
use crate::uncertainty::clamp_nonneg;

/// Energy spreads at or below this make every speed limit vacuous.
pub const ZERO_VARIANCE_TOL: f64 = 1e-12;
/// `sin s0` (pure) or `cos(s0/2)` (mixed) below this counts as singular.
pub const SINGULAR_DENOMINATOR: f64 = 1e-8;
/// `1 - P cos^2(s0/2)` below this counts as underflow.
pub const RADICAND_FLOOR: f64 = 1e-12;
/// A correction at or above this cannot be divided by a singular denominator.
pub const K_FLOOR: f64 = 1e-10;
pub const DEFAULT_STEPS: usize = 400;

fn check_delta_h(delta_h: f64) -> Result<()> {
    if !(delta_h > ZERO_VARIANCE_TOL) {
        return Err(QslError::ZeroEnergyVariance { delta_h });
    }
    Ok(())
}

/// `hbar s0 / (2 dH)` at sample `k`.
pub fn mt_bound_pure(traj: &Trajectory<PureState>, k: usize) -> Result<f64> {
    check_delta_h(traj.delta_h)?;
    Ok(traj.hbar * traj.s0[k] / (2.0 * traj.delta_h))
}

/// `max(pi hbar / (2 dH), pi hbar / (2 <H>))` for orthogonal endpoints.
pub fn combined_bound_orthogonal(h: &Observable, psi0: &PureState, hbar: f64) -> Result<f64> {
    let mean = expectation(h, psi0)?;
    let delta_h = variance(h, psi0)?.sqrt();
    check_delta_h(delta_h)?;
    if mean <= ZERO_VARIANCE_TOL {
        return Err(QslError::NonPositiveMeanEnergy { mean });
    }
    Ok((PI * hbar / (2.0 * delta_h)).max(PI * hbar / (2.0 * mean)))
}

/// `hbar (acos sqrt Tr(rho0 rho_tau) - acos sqrt Tr(rho0^2)) / dH`.
pub fn mixed_geodesic_term(
    rho0: &DensityMatrix,
    rho_tau: &DensityMatrix,
    delta_h: f64,
    hbar: f64,
) -> Result<f64> {
    check_delta_h(delta_h)?;
    let overlap = overlap_trace(rho0, rho_tau).clamp(0.0, 1.0);
    let p = purity(rho0).clamp(0.0, 1.0);
    Ok(hbar * (overlap.sqrt().acos() - p.sqrt().acos()) / delta_h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validity {
    /// Before the first overlap minimum.
    Clean,
    /// Past the first overlap minimum; reported but outside the derivation.
    OutsideDerivation,
}

impl Validity {
    pub fn as_str(self) -> &'static str {
        match self {
            Validity::Clean => "clean",
            Validity::OutsideDerivation => "outside",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureInfo {
    pub scheme: String,
    pub step: f64,
    pub estimated_error: f64,
}

/// Decomposed bound at one evolution time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub tau_actual: f64,
    /// Geodesic term: the MT bound for pure states.
    pub tau_mt: f64,
    /// Raw integral of the correction integrand.
    pub correction_integral: f64,
    /// `correction_integral` times its prefactor.
    pub correction_term: f64,
    pub tau_tqsl: f64,
    pub delta: f64,
    pub basis_id: String,
    pub validity: Validity,
    pub quadrature: QuadratureInfo,
}

/// One row of a bound curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub t: f64,
    pub tau_mt: f64,
    pub correction_integral: f64,
    pub correction_term: f64,
    pub tau_tqsl: f64,
    pub delta: f64,
    /// Richardson estimate on `correction_term`.
    pub quad_error: f64,
    pub validity: Validity,
}

#[derive(Clone, Debug)]
pub struct BoundCurve {
    pub rows: Vec<BoundRow>,
    pub basis_id: String,
    pub step: f64,
}

impl BoundCurve {
    pub fn report_at(&self, k: usize) -> BoundReport {
        let r = &self.rows[k];
        BoundReport {
            tau_actual: r.t,
            tau_mt: r.tau_mt,
            correction_integral: r.correction_integral,
            correction_term: r.correction_term,
            tau_tqsl: r.tau_tqsl,
            delta: r.delta,
            basis_id: self.basis_id.clone(),
            validity: r.validity,
            quadrature: QuadratureInfo {
                scheme: QuadratureScheme::TrapezoidRichardson.name().into(),
                step: self.step,
                estimated_error: r.quad_error,
            },
        }
    }

    pub fn final_report(&self) -> BoundReport {
        self.report_at(self.rows.len() - 1)
    }

    pub fn min_delta(&self) -> f64 {
        self.rows.iter().map(|r| r.delta).fold(f64::INFINITY, f64::min)
    }

    pub fn max_delta(&self) -> f64 {
        self.rows.iter().map(|r| r.delta).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Basis-independent pieces of one trajectory sample.
#[derive(Clone, Debug)]
enum SampleOps {
    /// `A'|Psi>` and `B'|Psi>`.
    Pure { a_psi: Vec<C64>, b_psi: Vec<C64> },
    /// `A' rho A'` and `B' rho B'`.
    Mixed { f: ComplexMatrix, g: ComplexMatrix },
}

#[derive(Clone, Copy, Debug)]
enum Singularity {
    None,
    /// Divides by `sin s0` (or `cos(s0/2)`) below [`SINGULAR_DENOMINATOR`].
    Angle(f64),
    /// Radicand below [`RADICAND_FLOOR`].
    Radicand(f64),
}

#[derive(Clone, Debug)]
struct Sample {
    ops: SampleOps,
    cross: f64,
    geodesic: f64,
    denominator: f64,
    singularity: Singularity,
}

/// Precomputed trajectory data from which the tighter bound can be
/// evaluated cheaply for many bases.
#[derive(Clone, Debug)]
pub struct BoundEvaluator {
    times: Vec<f64>,
    samples: Vec<Sample>,
    prefactor: f64,
    first_overlap_minimum: Option<usize>,
    dim: usize,
}

/// States for which a tighter speed limit is defined.
pub trait BoundState: Evolvable {
    fn evaluator(traj: &Trajectory<Self>) -> Result<BoundEvaluator>;
}

impl BoundState for PureState {
    fn evaluator(traj: &Trajectory<Self>) -> Result<BoundEvaluator> {
        BoundEvaluator::pure(traj)
    }
}

impl BoundState for DensityMatrix {
    fn evaluator(traj: &Trajectory<Self>) -> Result<BoundEvaluator> {
        BoundEvaluator::mixed(traj)
    }
}

fn centered_matrix(m: &ComplexMatrix, state: &impl QuantumState) -> ComplexMatrix {
    m.shift_diagonal(state.mean_of(m).re)
}

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
}

impl BoundEvaluator {
    /// `A = |Psi(0)><Psi(0)|`, `B = H`.
    pub fn pure(traj: &Trajectory<PureState>) -> Result<Self> {
        check_delta_h(traj.delta_h)?;
        let a = ComplexMatrix::outer(traj.initial().amplitudes(), traj.initial().amplitudes());
        let h = traj.hamiltonian.matrix();
        let samples = traj
            .states
            .par_iter()
            .enumerate()
            .map(|(k, psi)| {
                let a_psi = centered_matrix(&a, psi).apply(psi.amplitudes());
                let b_psi = centered_matrix(h, psi).apply(psi.amplitudes());
                let cross = inner(&a_psi, &b_psi).norm();
                let sin_s0 = traj.s0[k].sin();
                let singularity = if sin_s0 < SINGULAR_DENOMINATOR {
                    Singularity::Angle(sin_s0)
                } else {
                    Singularity::None
                };
                Sample {
                    ops: SampleOps::Pure { a_psi, b_psi },
                    cross,
                    geodesic: traj.hbar * traj.s0[k] / (2.0 * traj.delta_h),
                    denominator: sin_s0,
                    singularity,
                }
            })
            .collect();
        Ok(Self {
            times: traj.times.clone(),
            samples,
            prefactor: 2.0 / traj.delta_h,
            first_overlap_minimum: traj.first_overlap_minimum,
            dim: traj.initial().dim(),
        })
    }

    /// `A = rho(0)`, `B = H`.
    pub fn mixed(traj: &Trajectory<DensityMatrix>) -> Result<Self> {
        check_delta_h(traj.delta_h)?;
        let rho0 = traj.initial();
        let p = purity(rho0).clamp(0.0, 1.0);
        let a = rho0.matrix();
        let h = traj.hamiltonian.matrix();
        let samples = traj
            .states
            .par_iter()
            .enumerate()
            .map(|(k, rho)| {
                let r = rho.matrix();
                let a_bar = centered_matrix(a, rho);
                let b_bar = centered_matrix(h, rho);
                let f = &(&a_bar * r) * &a_bar;
                let g = &(&b_bar * r) * &b_bar;
                let cross = rho.mean_of(&(&a_bar * &b_bar)).norm();

                let cos_half = traj.overlap[k];
                let radicand = (1.0 - p * cos_half * cos_half).max(0.0);
                let singularity = if cos_half < SINGULAR_DENOMINATOR {
                    Singularity::Angle(cos_half)
                } else if radicand < RADICAND_FLOOR {
                    Singularity::Radicand(radicand)
                } else {
                    Singularity::None
                };
                let tr = overlap_trace(rho0, rho).clamp(0.0, 1.0);
                Sample {
                    ops: SampleOps::Mixed { f, g },
                    cross,
                    geodesic: traj.hbar * (tr.sqrt().acos() - p.sqrt().acos()) / traj.delta_h,
                    denominator: cos_half * radicand.sqrt(),
                    singularity,
                }
            })
            .collect();
        Ok(Self {
            times: traj.times.clone(),
            samples,
            prefactor: 1.0 / (p.sqrt() * traj.delta_h),
            first_overlap_minimum: traj.first_overlap_minimum,
            dim: traj.initial().dim(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Last sample index inside the derivation's range.
    pub fn last_valid_index(&self) -> usize {
        self.first_overlap_minimum.unwrap_or(self.len() - 1)
    }

    pub fn is_validity_clean(&self) -> bool {
        self.first_overlap_minimum.is_none()
    }

    /// Correction `K` at sample `k`, clamped at zero.
    pub fn correction_k(&self, k: usize, basis: &OrthonormalBasis) -> Result<f64> {
        let s = &self.samples[k];
        let tighter: f64 = match &s.ops {
            SampleOps::Pure { a_psi, b_psi } => basis
                .vectors()
                .iter()
                .map(|v| (inner(a_psi, v) * inner(v, b_psi)).norm())
                .sum(),
            SampleOps::Mixed { f, g } => basis
                .vectors()
                .iter()
                .map(|v| (f.sandwich(v, v) * g.sandwich(v, v)).norm().sqrt())
                .sum(),
        };
        clamp_nonneg("K", tighter - s.cross)
    }

    fn integrand(&self, k: usize, basis: &OrthonormalBasis) -> Result<f64> {
        let s = &self.samples[k];
        let kval = self.correction_k(k, basis)?;
        match s.singularity {
            Singularity::None => Ok(kval / s.denominator),
            // removable at t = 0, and harmless wherever K vanishes
            _ if k == 0 || kval < K_FLOOR => Ok(0.0),
            Singularity::Angle(value) => Err(QslError::SingularIntegrand {
                t: self.times[k],
                sin_s0: value,
                k: kval,
            }),
            Singularity::Radicand(value) => Err(QslError::DenominatorUnderflow {
                t: self.times[k],
                denominator: value,
                k: kval,
            }),
        }
    }

    /// Bound values at every sample for the given basis.
    pub fn curve(&self, basis: &OrthonormalBasis, basis_id: &str) -> Result<BoundCurve> {
        if basis.dim() != self.dim {
            return Err(QslError::DimensionMismatch {
                expected: self.dim,
                found: basis.dim(),
            });
        }
        let integrand = (0..self.len())
            .map(|k| self.integrand(k, basis))
            .collect::<Result<Vec<_>>>()?;
        let cumulative = quadrature::cumulative(&self.times, &integrand)?;
        let rows = cumulative
            .iter()
            .enumerate()
            .map(|(k, q)| {
                let tau_mt = self.samples[k].geodesic;
                let correction_term = self.prefactor * q.value;
                let tau_tqsl = tau_mt + correction_term;
                BoundRow {
                    t: self.times[k],
                    tau_mt,
                    correction_integral: q.value,
                    correction_term,
                    tau_tqsl,
                    delta: tau_tqsl - tau_mt,
                    quad_error: self.prefactor * q.error_estimate,
                    validity: if self.first_overlap_minimum.is_none_or(|m| k <= m) {
                        Validity::Clean
                    } else {
                        Validity::OutsideDerivation
                    },
                }
            })
            .collect();
        Ok(BoundCurve {
            rows,
            basis_id: basis_id.to_string(),
            step: self.times[1] - self.times[0],
        })
    }

    /// `tau_tqsl` at sample `k`; only the prefix up to `k` is integrated.
    pub fn objective_at(&self, k: usize, basis: &OrthonormalBasis) -> Result<f64> {
        let integrand = (0..=k)
            .map(|j| self.integrand(j, basis))
            .collect::<Result<Vec<_>>>()?;
        let value = quadrature::cumulative(&self.times[..=k], &integrand)?
            .last()
            .map_or(0.0, |q| q.value);
        Ok(self.samples[k].geodesic + self.prefactor * value)
    }
}

fn checked_final_report<S: BoundState>(
    traj: &Trajectory<S>,
    basis: &OrthonormalBasis,
    basis_id: &str,
) -> Result<BoundReport> {
    if let Some(k) = traj.first_overlap_minimum {
        return Err(QslError::ValidityExceeded {
            tau: *traj.times.last().expect("nonempty"),
            flagged_at: traj.times[k],
        });
    }
    Ok(S::evaluator(traj)?.curve(basis, basis_id)?.final_report())
}

/// Tighter pure-state bound at evolution time `tau`.
pub fn tqsl_pure(
    h: &Observable,
    psi0: &PureState,
    tau: f64,
    basis: &OrthonormalBasis,
    steps: usize,
    hbar: f64,
) -> Result<BoundReport> {
    let traj = sample_trajectory_with_hbar(h, psi0, tau, steps, hbar)?;
    checked_final_report(&traj, basis, "custom")
}

/// Tighter mixed-state bound at evolution time `tau`.
pub fn tqsl_mixed(
    h: &Observable,
    rho0: &DensityMatrix,
    tau: f64,
    basis: &OrthonormalBasis,
    steps: usize,
    hbar: f64,
) -> Result<BoundReport> {
    let traj = sample_trajectory_with_hbar(h, rho0, tau, steps, hbar)?;
    checked_final_report(&traj, basis, "custom")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Initial rotation angle of a perturbation.
    pub initial_step: f64,
    /// Step multiplier after `patience` rejections in a row.
    pub shrink: f64,
    pub patience: usize,
    pub min_step: f64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            iterations: 200,
            seed: 0,
            initial_step: 0.3,
            shrink: 0.5,
            patience: 10,
            min_step: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BasisCandidate {
    pub id: String,
    pub basis: OrthonormalBasis,
}

/// The standard basis, the eigenbasis of a GUE draw, then further GUE
/// eigenbases, `restarts` in total.
pub fn default_starts(dim: usize, cfg: &OptConfig) -> Vec<BasisCandidate> {
    (0..cfg.restarts)
        .map(|r| match r {
            0 => BasisCandidate {
                id: "standard".into(),
                basis: OrthonormalBasis::standard(dim),
            },
            _ => {
                let seed = cfg.seed.wrapping_add(r as u64 - 1);
                BasisCandidate {
                    id: format!("gue-eigenbasis(seed={seed})"),
                    basis: random_basis_with(dim, &mut seeded_rng(seed, Stream::Basis)),
                }
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartLog {
    pub restart: usize,
    pub start_id: String,
    pub start_objective: f64,
    pub best_objective: f64,
    pub evaluations: usize,
    pub accepted: usize,
    pub final_step: f64,
}

#[derive(Clone, Debug)]
pub struct OptimizationOutcome {
    pub basis: OrthonormalBasis,
    pub basis_id: String,
    /// Sample index whose bound was maximized.
    pub target_index: usize,
    pub objective: f64,
    pub log: Vec<RestartLog>,
}

/// `e^{i eps G} V` for a GUE direction `G`.
fn perturb(basis: &OrthonormalBasis, step: f64, rng: &mut ChaCha8Rng) -> Option<OrthonormalBasis> {
    let g = sample_gue_with(basis.dim(), rng);
    let u = eigh(g.matrix()).ok()?.exp_i(-step);
    OrthonormalBasis::from_unitary_columns(&(&u * &basis.to_matrix())).ok()
}

fn climb(
    evaluator: &BoundEvaluator,
    target: usize,
    restart: usize,
    start: &BasisCandidate,
    cfg: &OptConfig,
) -> Result<(OrthonormalBasis, RestartLog)> {
    let mut rng = seeded_rng(cfg.seed.wrapping_add(restart as u64), Stream::Optimizer);
    let start_objective = evaluator.objective_at(target, &start.basis)?;
    let mut best = start.basis.clone();
    let mut best_obj = start_objective;
    let mut step = cfg.initial_step;
    let mut misses = 0;
    let mut evaluations = 1;
    let mut accepted = 0;
    for _ in 0..cfg.iterations {
        if step < cfg.min_step {
            break;
        }
        let Some(candidate) = perturb(&best, step, &mut rng) else {
            misses += 1;
            continue;
        };
        evaluations += 1;
        match evaluator.objective_at(target, &candidate) {
            Ok(obj) if obj > best_obj => {
                best = candidate;
                best_obj = obj;
                accepted += 1;
                misses = 0;
            }
            _ => misses += 1,
        }
        if misses >= cfg.patience {
            step *= cfg.shrink;
            misses = 0;
        }
    }
    Ok((
        best,
        RestartLog {
            restart,
            start_id: start.id.clone(),
            start_objective,
            best_objective: best_obj,
            evaluations,
            accepted,
            final_step: step,
        },
    ))
}

/// Random-restart hill climbing over unitaries acting on the basis,
/// maximizing the bound at the last validity-clean sample.
pub fn optimize_on(
    evaluator: &BoundEvaluator,
    starts: &[BasisCandidate],
    cfg: &OptConfig,
) -> Result<OptimizationOutcome> {
    if starts.is_empty() {
        return Err(QslError::InvalidConfig("optimizer needs at least one start".into()));
    }
    let target = evaluator.last_valid_index();
    let results = starts
        .par_iter()
        .enumerate()
        .map(|(r, start)| climb(evaluator, target, r, start, cfg))
        .collect::<Result<Vec<_>>>()?;

    // max by objective, ties to the lowest restart index
    let mut best_idx = 0;
    for (i, (_, log)) in results.iter().enumerate() {
        if log.best_objective > results[best_idx].1.best_objective {
            best_idx = i;
        }
    }
    let log: Vec<RestartLog> = results.iter().map(|(_, l)| l.clone()).collect();
    let (basis, best_log) = &results[best_idx];
    Ok(OptimizationOutcome {
        basis: basis.clone(),
        basis_id: format!("optimized(restart={}, start={})", best_idx, best_log.start_id),
        target_index: target,
        objective: best_log.best_objective,
        log,
    })
}

/// Maximizes the tighter bound at `tau` over bases.
pub fn optimize_basis<S: BoundState>(
    h: &Observable,
    state0: &S,
    tau: f64,
    steps: usize,
    hbar: f64,
    cfg: &OptConfig,
) -> Result<(OrthonormalBasis, BoundReport, OptimizationOutcome)> {
    let traj = sample_trajectory_with_hbar(h, state0, tau, steps, hbar)?;
    let evaluator = S::evaluator(&traj)?;
    let starts = default_starts(evaluator.dim(), cfg);
    let outcome = optimize_on(&evaluator, &starts, cfg)?;
    let curve = evaluator.curve(&outcome.basis, &outcome.basis_id)?;
    let report = curve.report_at(outcome.target_index);
    Ok((outcome.basis.clone(), report, outcome))
}
