//! Quantum speed limits tightened by basis-resolved uncertainty relations.
//!
//! The crate evaluates the Mandelstam–Tamm bound and its tighter
//! basis-dependent refinement along sampled unitary trajectories, for pure
//! and mixed states, and optimizes the basis to make the bound as tight as
//! possible.

pub mod dynamics;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod quadrature;
pub mod speed_limit;
pub mod state;
pub mod uncertainty;

pub use error::{QslError, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, C64};
pub use state::{DensityMatrix, Observable, OrthonormalBasis, PureState, QuantumState};
