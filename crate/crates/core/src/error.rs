use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QslError {
    #[error("matrix is not Hermitian: max |H - H^dagger| = {defect:.3e}")]
    NonHermitianInput { defect: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expectation value has imaginary part {imag:.3e}")]
    NonRealExpectation { imag: f64 },

    #[error("invalid orthonormal basis: {0}")]
    InvalidBasis(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("energy variance {delta_h:.3e} is too small; the state is stationary")]
    ZeroEnergyVariance { delta_h: f64 },

    #[error("mean energy {mean:.3e} is not positive")]
    NonPositiveMeanEnergy { mean: f64 },

    #[error("time {tau} is past the first overlap minimum at t = {flagged_at}")]
    ValidityExceeded { tau: f64, flagged_at: f64 },

    #[error("correction integrand is singular at t = {t}: sin s0 = {sin_s0:.3e}, K = {k:.3e}")]
    SingularIntegrand { t: f64, sin_s0: f64, k: f64 },

    #[error("mixed-state denominator underflows at t = {t}: {denominator:.3e} with K = {k:.3e}")]
    DenominatorUnderflow { t: f64, denominator: f64, k: f64 },

    #[error("non-finite integrand sample at t = {t}")]
    NonFiniteSample { t: f64 },

    #[error("block index {index} is outside 1..={num_spins}")]
    BlockIndexOutOfRange { index: usize, num_spins: usize },

    #[error("initial state is not a product state (min single-qubit purity {purity:.3e})")]
    NotProductState { purity: f64 },

    #[error("{quantity} = {value:.3e} violates its lower bound of zero beyond round-off")]
    NegativeBeyondRoundoff { quantity: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, QslError>;
