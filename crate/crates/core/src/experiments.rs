//! Experiment drivers: GUE sweeps, the spin chain, and the property suite.
//!
//! Each driver writes plot-ready CSV files plus a JSON summary into the
//! configured output directory. Runs inside a batch are independent; a run
//! that fails records its error in the summary instead of aborting the batch.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{sample_trajectory_with_hbar, trajectory_from_states, uniform_grid};
use crate::ensembles::{
    random_basis_with, random_density_matrix, random_pure_state, sample_gue, sample_gue_with,
    seeded_rng, spin_chain_evolved_state, spin_chain_hamiltonian, GueConfig, SpinChainConfig,
    Stream,
};
use crate::error::{QslError, Result};
use crate::linalg::{c, eigh, ComplexMatrix, C64};
use crate::speed_limit::{
    default_starts, optimize_on, BoundCurve, BoundEvaluator, OptConfig, Validity,
};
use crate::state::{KetJson, Observable, OrthonormalBasis, PureState, QuantumState};
use crate::uncertainty::{
    commutator_mean, cross_term, f_operator, tighter_bound_mixed, tighter_bound_mixed_with,
    tighter_bound_pure, Projection,
};
use crate::state::variance;

/// Header of every bound CSV.
pub const CSV_HEADER: &str = "t,tau_mt,tau_tqsl,delta,quad_error,validity";
/// Rows with `delta` below this count as violations.
pub const DELTA_TOL: f64 = 1e-9;
/// Clean rows with `t < tau_tqsl - BOUND_TOL` count as violations.
pub const BOUND_TOL: f64 = 1e-6;
/// Minimum closed-form vs. matrix-exponential fidelity.
pub const FIDELITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    #[default]
    Gue,
    Spin,
    Verify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisMode {
    /// Eigenbasis of an independent GUE draw with the run's seed.
    #[default]
    FixedRandom,
    Optimize,
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Hilbert-space dimension of GUE runs and the property suite's largest
    /// dimension.
    pub dim: usize,
    /// Spin-chain model; its `hbar` is overridden by the top-level one.
    pub spin: SpinChainConfig,
    pub t_max: f64,
    pub steps: usize,
    /// One GUE Hamiltonian per seed.
    pub seeds: Vec<u64>,
    pub basis_mode: BasisMode,
    pub hbar: f64,
    pub output_path: PathBuf,
    /// Initial state; defaults depend on the experiment.
    pub state: Option<KetJson>,
    /// Draws per invariant and dimension in the property suite.
    pub trials: usize,
    pub optimizer: OptConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::for_kind(ExperimentKind::Gue)
    }
}

impl ExperimentConfig {
    pub fn for_kind(kind: ExperimentKind) -> Self {
        let (t_max, steps) = match kind {
            ExperimentKind::Spin => (2.0, 200),
            _ => (3.0, 300),
        };
        Self {
            kind,
            dim: if kind == ExperimentKind::Verify { 6 } else { 3 },
            spin: SpinChainConfig::two_spin_default(),
            t_max,
            steps,
            seeds: vec![0, 1, 2],
            basis_mode: BasisMode::FixedRandom,
            hbar: 1.0,
            output_path: PathBuf::from("out"),
            state: None,
            trials: 1000,
            optimizer: OptConfig::default(),
        }
    }

    pub fn n_hamiltonians(&self) -> usize {
        self.seeds.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QslError::InvalidConfig(msg));
        if self.steps < 2 {
            return bad(format!("steps must be at least 2, got {}", self.steps));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return bad(format!("hbar must be positive, got {}", self.hbar));
        }
        match self.kind {
            ExperimentKind::Gue => {
                if self.seeds.is_empty() {
                    return bad("at least one seed is required".into());
                }
                GueConfig { dim: self.dim, seed: 0 }.validate()?;
            }
            ExperimentKind::Spin => self.spin.validate()?,
            ExperimentKind::Verify => {
                if self.seeds.is_empty() {
                    return bad("at least one seed is required".into());
                }
                if self.trials == 0 {
                    return bad("trials must be at least 1".into());
                }
                if self.dim < 2 {
                    return bad(format!("dim must be at least 2, got {}", self.dim));
                }
            }
        }
        if self.basis_mode == BasisMode::Optimize && self.optimizer.restarts == 0 {
            return bad("optimizer needs at least one restart".into());
        }
        Ok(())
    }
}

/// `sqrt(0.1)|0> + sqrt(0.2)|1> + sqrt(0.7)|2>` for `dim = 3`, otherwise the
/// uniform superposition.
pub fn default_gue_state(dim: usize) -> PureState {
    if dim == 3 {
        PureState::from_real(&[0.1f64.sqrt(), 0.2f64.sqrt(), 0.7f64.sqrt()])
            .expect("normalized")
    } else {
        let a = 1.0 / (dim as f64).sqrt();
        PureState::new(vec![c(a, 0.0); dim]).expect("normalized")
    }
}

fn io_err(path: &Path, e: std::io::Error) -> QslError {
    QslError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// CSV text for a bound curve, header included.
pub fn curve_csv(curve: &BoundCurve) -> String {
    let mut s = String::with_capacity(64 * (curve.rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &curve.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_float(r.t),
            fmt_float(r.tau_mt),
            fmt_float(r.tau_tqsl),
            fmt_float(r.delta),
            fmt_float(r.quad_error),
            r.validity.as_str()
        );
    }
    s
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunFlags {
    /// Time of the first overlap minimum, if the trajectory passes one.
    pub flagged_at: Option<f64>,
    pub outside_rows: usize,
    pub negative_delta_rows: usize,
    /// Clean rows where the bound exceeds the elapsed time.
    pub bound_violation_rows: usize,
}

impl RunFlags {
    fn from_curve(curve: &BoundCurve, flagged_at: Option<f64>) -> Self {
        let clean = |r: &&crate::speed_limit::BoundRow| r.validity == Validity::Clean;
        Self {
            flagged_at,
            outside_rows: curve.rows.iter().filter(|r| r.validity != Validity::Clean).count(),
            negative_delta_rows: curve.rows.iter().filter(|r| r.delta < -DELTA_TOL).count(),
            bound_violation_rows: curve
                .rows
                .iter()
                .filter(clean)
                .filter(|r| r.t < r.tau_tqsl - BOUND_TOL)
                .count(),
        }
    }

    fn violated(&self) -> bool {
        self.negative_delta_rows > 0 || self.bound_violation_rows > 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub csv: Option<String>,
    pub basis_id: Option<String>,
    pub min_delta: Option<f64>,
    pub max_delta: Option<f64>,
    /// Largest correction-term error estimate over the curve.
    pub max_quad_error: Option<f64>,
    pub flags: RunFlags,
    pub error: Option<String>,
}

impl RunSummary {
    fn failed(seed: u64, err: QslError) -> Self {
        Self {
            seed,
            csv: None,
            basis_id: None,
            min_delta: None,
            max_delta: None,
            max_quad_error: None,
            flags: RunFlags::default(),
            error: Some(err.to_string()),
        }
    }

    fn from_curve(seed: u64, csv: String, curve: &BoundCurve, flagged_at: Option<f64>) -> Self {
        Self {
            seed,
            csv: Some(csv),
            basis_id: Some(curve.basis_id.clone()),
            min_delta: Some(curve.min_delta()),
            max_delta: Some(curve.max_delta()),
            max_quad_error: Some(
                curve.rows.iter().map(|r| r.quad_error).fold(0.0, f64::max),
            ),
            flags: RunFlags::from_curve(curve, flagged_at),
            error: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.flags.violated()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GueSummary {
    pub config: ExperimentConfig,
    pub n_hamiltonians: usize,
    pub runs: Vec<RunSummary>,
    pub passed: bool,
}

fn choose_basis(
    evaluator: &BoundEvaluator,
    mode: BasisMode,
    seed: u64,
    opt: &OptConfig,
) -> Result<(OrthonormalBasis, String)> {
    let dim = evaluator.dim();
    Ok(match mode {
        BasisMode::Identity => (OrthonormalBasis::standard(dim), "standard".into()),
        BasisMode::FixedRandom => (
            random_basis_with(dim, &mut seeded_rng(seed, Stream::Basis)),
            format!("gue-eigenbasis(seed={seed})"),
        ),
        BasisMode::Optimize => {
            let cfg = OptConfig {
                seed: opt.seed.wrapping_add(seed),
                ..opt.clone()
            };
            let outcome = optimize_on(evaluator, &default_starts(dim, &cfg), &cfg)?;
            (outcome.basis, outcome.basis_id)
        }
    })
}

fn initial_state(cfg: &ExperimentConfig, dim: usize, default: impl FnOnce() -> PureState) -> Result<PureState> {
    match &cfg.state {
        None => Ok(default()),
        Some(k) => {
            let psi = k.to_state()?;
            if psi.dim() != dim {
                return Err(QslError::DimensionMismatch {
                    expected: dim,
                    found: psi.dim(),
                });
            }
            Ok(psi)
        }
    }
}

/// The bound curve of one GUE Hamiltonian.
pub fn gue_curve(cfg: &ExperimentConfig, psi0: &PureState, seed: u64) -> Result<(BoundCurve, Option<f64>)> {
    let h = sample_gue(GueConfig { dim: cfg.dim, seed })?;
    let traj = sample_trajectory_with_hbar(&h, psi0, cfg.t_max, cfg.steps, cfg.hbar)?;
    let evaluator = BoundEvaluator::pure(&traj)?;
    let (basis, id) = choose_basis(&evaluator, cfg.basis_mode, seed, &cfg.optimizer)?;
    Ok((evaluator.curve(&basis, &id)?, traj.flagged_time()))
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| QslError::Io(format!("{}: {e}", path.display())))?;
    text.push('\n');
    write_file(path, &text)
}

/// One CSV per seed plus `summary.json`.
pub fn run_experiment_gue(cfg: &ExperimentConfig) -> Result<GueSummary> {
    cfg.validate()?;
    let psi0 = initial_state(cfg, cfg.dim, || default_gue_state(cfg.dim))?;
    ensure_dir(&cfg.output_path)?;

    let runs: Vec<RunSummary> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let name = format!("gue_seed{seed:04}.csv");
            let result = gue_curve(cfg, &psi0, seed).and_then(|(curve, flagged)| {
                write_file(&cfg.output_path.join(&name), &curve_csv(&curve))?;
                Ok(RunSummary::from_curve(seed, name, &curve, flagged))
            });
            result.unwrap_or_else(|e| RunSummary::failed(seed, e))
        })
        .collect();

    let summary = GueSummary {
        config: cfg.clone(),
        n_hamiltonians: runs.len(),
        passed: runs.iter().all(RunSummary::passed),
        runs,
    };
    write_json(&cfg.output_path.join("summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinSummary {
    pub config: ExperimentConfig,
    pub run: RunSummary,
    /// `1 - min_t |<closed form|expm>|^2`.
    pub max_fidelity_deviation: f64,
    pub fidelity_csv: String,
    pub passed: bool,
}

pub struct SpinCurve {
    pub curve: BoundCurve,
    pub flagged_at: Option<f64>,
    /// `(t, |<closed form|expm>|^2)`.
    pub fidelity: Vec<(f64, f64)>,
}

/// Closed-form and matrix-exponential spin-chain trajectories, their
/// fidelities, and the bound curve of the closed-form trajectory.
pub fn spin_curve(cfg: &ExperimentConfig) -> Result<SpinCurve> {
    let spin = SpinChainConfig {
        hbar: cfg.hbar,
        ..cfg.spin.clone()
    };
    let h = spin_chain_hamiltonian(&spin)?;
    let psi0 = initial_state(cfg, spin.dim(), || PureState::basis(spin.dim(), 0))?;
    let times = uniform_grid(cfg.t_max, cfg.steps)?;
    let closed = times
        .par_iter()
        .map(|&t| spin_chain_evolved_state(&spin, &psi0, t))
        .collect::<Result<Vec<_>>>()?;
    let traj = trajectory_from_states(&h, times, closed, cfg.hbar)?;

    let reference = sample_trajectory_with_hbar(&h, &psi0, cfg.t_max, cfg.steps, cfg.hbar)?;
    let fidelity = traj
        .states
        .iter()
        .zip(&reference.states)
        .zip(&traj.times)
        .map(|((a, b), &t)| Ok((t, a.overlap(b)?.norm_sqr())))
        .collect::<Result<Vec<_>>>()?;

    let evaluator = BoundEvaluator::pure(&traj)?;
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let (basis, id) = choose_basis(&evaluator, cfg.basis_mode, seed, &cfg.optimizer)?;
    Ok(SpinCurve {
        curve: evaluator.curve(&basis, &id)?,
        flagged_at: traj.flagged_time(),
        fidelity,
    })
}

/// `spin.csv`, `spin_fidelity.csv` and `summary.json`.
pub fn run_experiment_spin(cfg: &ExperimentConfig) -> Result<SpinSummary> {
    cfg.validate()?;
    cfg.spin.validate()?;
    ensure_dir(&cfg.output_path)?;
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let name = "spin.csv".to_string();
    let fidelity_name = "spin_fidelity.csv".to_string();

    let (run, deviation) = match spin_curve(cfg) {
        Ok(SpinCurve {
            curve,
            flagged_at,
            fidelity,
        }) => {
            write_file(&cfg.output_path.join(&name), &curve_csv(&curve))?;
            let mut s = String::from("t,fidelity\n");
            for (t, f) in &fidelity {
                let _ = writeln!(s, "{},{}", fmt_float(*t), fmt_float(*f));
            }
            write_file(&cfg.output_path.join(&fidelity_name), &s)?;
            let deviation = fidelity.iter().map(|&(_, f)| 1.0 - f).fold(0.0, f64::max);
            (RunSummary::from_curve(seed, name, &curve, flagged_at), deviation)
        }
        Err(e) => (RunSummary::failed(seed, e), f64::NAN),
    };
    let summary = SpinSummary {
        config: cfg.clone(),
        passed: run.passed() && deviation <= FIDELITY_TOL,
        run,
        max_fidelity_deviation: deviation,
        fidelity_csv: fidelity_name,
    };
    write_json(&cfg.output_path.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Outcome of one invariant. It passes iff `worst_slack >= -tolerance`;
/// for equalities the slack is minus the deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub trials: usize,
    pub worst_slack: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub seed: u64,
    pub trials_per_dim: usize,
    pub dims: Vec<usize>,
    pub results: Vec<PropertyResult>,
    pub passed: bool,
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    trials: usize,
    worst: f64,
    errors: Vec<String>,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            trials: 0,
            worst: f64::INFINITY,
            errors: Vec::new(),
        }
    }

    fn record(&mut self, slacks: Result<Vec<f64>>) {
        self.trials += 1;
        match slacks {
            Ok(v) => {
                for s in v {
                    // NaN must fail
                    self.worst = if s.is_nan() { f64::NEG_INFINITY } else { self.worst.min(s) };
                }
            }
            Err(e) => self.errors.push(e.to_string()),
        }
    }

    fn finish(self) -> PropertyResult {
        let passed = self.errors.is_empty() && self.worst >= -self.tolerance;
        PropertyResult {
            name: self.name.into(),
            trials: self.trials,
            worst_slack: self.worst,
            tolerance: self.tolerance,
            passed,
            errors: self.errors,
        }
    }
}

fn random_rank<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> usize {
    rng.random_range(1..=dim)
}

fn check_trials(dim: usize, trials: usize, seed: u64) -> Vec<PropertyResult> {
    // one stream per dimension keeps results independent of the dim list
    let mut rng = seeded_rng(seed.wrapping_add(1000 * dim as u64), Stream::State);
    let mut pure_chain = Tally::new("uncertainty-chain-pure", 1e-9);
    let mut mixed_chain = Tally::new("uncertainty-chain-mixed", 1e-9);
    let mut reduction = Tally::new("mixed-to-pure-reduction", 1e-9);
    let mut sides = Tally::new("projection-side-insensitivity", 1e-9);
    let mut f_pos = Tally::new("f-positivity", 1e-10);
    let mut recon = Tally::new("eigh-reconstruction", 1e-9);
    let mut unitary = Tally::new("expm-inverse", 1e-9);
    let mut lift = Tally::new("pure-lift-variance", 1e-10);

    for _ in 0..trials {
        let a = sample_gue_with(dim, &mut rng);
        let b = sample_gue_with(dim, &mut rng);
        let psi = random_pure_state(dim, &mut rng);
        let rank = random_rank(dim, &mut rng);
        let rho = random_density_matrix(dim, rank, &mut rng);
        let basis = random_basis_with(dim, &mut rng);
        let s = rng.random_range(-3.0..3.0);

        pure_chain.record((|| {
            let dadb = (variance(&a, &psi)? * variance(&b, &psi)?).sqrt();
            let tb = tighter_bound_pure(&a, &b, &psi, &basis)?;
            let cross = cross_term(&a, &b, &psi)?;
            let comm = 0.5 * commutator_mean(&a, &b, &psi)?.norm();
            Ok(vec![dadb - tb, tb - cross, cross - comm])
        })());
        mixed_chain.record((|| {
            let dadb = (variance(&a, &rho)? * variance(&b, &rho)?).sqrt();
            let tb = tighter_bound_mixed(&a, &b, &rho, &basis)?;
            let cross = cross_term(&a, &b, &rho)?;
            let comm = 0.5 * commutator_mean(&a, &b, &rho)?.norm();
            Ok(vec![dadb - tb, tb - cross, cross - comm])
        })());
        reduction.record((|| {
            let m = tighter_bound_mixed(&a, &b, &psi.to_density(), &basis)?;
            let p = tighter_bound_pure(&a, &b, &psi, &basis)?;
            Ok(vec![-(m - p).abs()])
        })());
        sides.record((|| {
            let l = tighter_bound_mixed_with(&a, &b, &rho, &basis, Projection::Left)?;
            let r = tighter_bound_mixed_with(&a, &b, &rho, &basis, Projection::Right)?;
            Ok(vec![-(l - r).abs()])
        })());
        f_pos.record((|| {
            let f = f_operator(&a, &rho)?;
            Ok(vec![eigh(&f)?.eigenvalues[0]])
        })());
        recon.record((|| {
            let e = eigh(a.matrix())?;
            let diff = (&e.reconstruct() - a.matrix()).frobenius_norm();
            Ok(vec![-diff / a.matrix().frobenius_norm()])
        })());
        unitary.record((|| {
            let e = eigh(a.matrix())?;
            let prod = &e.exp_i(s) * &e.exp_i(-s);
            Ok(vec![-prod.max_abs_diff(&ComplexMatrix::identity(dim))])
        })());
        lift.record((|| {
            let rho_psi = psi.to_density();
            let dv = variance(&a, &psi)? - variance(&a, &rho_psi)?;
            let dm = psi.mean_of(a.matrix()) - rho_psi.mean_of(a.matrix());
            Ok(vec![-dv.abs(), -dm.norm()])
        })());
    }
    [pure_chain, mixed_chain, reduction, sides, f_pos, recon, unitary, lift]
        .into_iter()
        .map(Tally::finish)
        .collect()
}

fn merge(per_dim: Vec<Vec<PropertyResult>>) -> Vec<PropertyResult> {
    let mut merged: Vec<PropertyResult> = Vec::new();
    for results in per_dim {
        for r in results {
            match merged.iter_mut().find(|m| m.name == r.name) {
                Some(m) => {
                    m.trials += r.trials;
                    m.worst_slack = m.worst_slack.min(r.worst_slack);
                    m.passed &= r.passed;
                    m.errors.extend(r.errors);
                }
                None => merged.push(r),
            }
        }
    }
    merged
}

/// A deliberately non-Hermitian operator must be rejected with an error.
fn non_hermitian_rejection() -> PropertyResult {
    let broken = ComplexMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(0.5, 0.0)],
        vec![c(0.0, 0.0), C64::new(-1.0, 0.0)],
    ])
    .expect("finite");
    let outcome = Observable::new(broken);
    let passed = matches!(outcome, Err(QslError::NonHermitianInput { .. }));
    PropertyResult {
        name: "non-hermitian-rejection".into(),
        trials: 1,
        worst_slack: if passed { 0.0 } else { f64::NEG_INFINITY },
        tolerance: 0.0,
        passed,
        errors: match outcome {
            Err(e) => vec![format!("rejected as expected: {e}")],
            Ok(_) => vec!["non-Hermitian input was accepted".into()],
        },
    }
}

/// Randomized checks of the library's invariants over dimensions
/// `2..=cfg.dim`.
pub fn property_report(cfg: &ExperimentConfig) -> Result<PropertyReport> {
    cfg.validate()?;
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let dims: Vec<usize> = (2..=cfg.dim).collect();
    let per_dim: Vec<Vec<PropertyResult>> = dims
        .par_iter()
        .map(|&d| check_trials(d, cfg.trials, seed))
        .collect();
    let mut results = merge(per_dim);
    results.push(non_hermitian_rejection());
    Ok(PropertyReport {
        seed,
        trials_per_dim: cfg.trials,
        dims,
        passed: results.iter().all(|r| r.passed),
        results,
    })
}

/// Runs the property suite and writes `properties.json`.
pub fn run_property_suite(cfg: &ExperimentConfig) -> Result<PropertyReport> {
    let report = property_report(cfg)?;
    ensure_dir(&cfg.output_path)?;
    write_json(&cfg.output_path.join("properties.json"), &report)?;
    Ok(report)
}

/// Process exit status for an experiment outcome.
pub fn exit_code(outcome: &Result<bool>) -> i32 {
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(
            QslError::InvalidConfig(_)
            | QslError::Io(_)
            | QslError::BlockIndexOutOfRange { .. }
            | QslError::DimensionMismatch { .. }
            | QslError::InvalidState(_),
        ) => 2,
        Err(_) => 1,
    }
}

/// Dispatches on `cfg.kind`; `Ok(passed)` on completion.
pub fn run(cfg: &ExperimentConfig) -> Result<bool> {
    match cfg.kind {
        ExperimentKind::Gue => run_experiment_gue(cfg).map(|s| s.passed),
        ExperimentKind::Spin => run_experiment_spin(cfg).map(|s| s.passed),
        ExperimentKind::Verify => run_property_suite(cfg).map(|r| r.passed),
    }
}
