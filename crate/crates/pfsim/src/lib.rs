//! Numerical simulator and verification library for even-order para-Fermi
//! oscillators hosted in a two-cavity, single-qubit system.
//!
//! The crate builds the cross-cavity Hamiltonians (with and without the
//! rotating-wave approximation), block-diagonalizes them with a parity
//! conditioned qubit flip, realizes the deformed ladder algebra on the
//! embedded (2λ+1)-dimensional subspaces, and checks every algebraic
//! identity, frame equivalence, and closed-form solution numerically with
//! explicit tolerances.
//!
//! Layout:
//! - [`numerics`]: dense complex kernel (Kronecker products, Hermitian
//!   eigendecomposition, spectral propagators).
//! - [`fock`]: truncated two-mode ⊗ qubit space and elementary operators.
//! - [`models`]: Hamiltonian builders, derived parameters, frame checks.
//! - [`parafermi`]: deformed ladder subspace, algebra verification,
//!   binomial states.
//! - [`dynamics`]: spectral time evolution, closed-form evaluator,
//!   collapse/revival detection.
//! - [`experiment`]: config-driven runners, presets, CSV/JSON output.

pub mod dynamics;
pub mod experiment;
pub mod fock;
pub mod models;
pub mod numerics;
pub mod parafermi;

use serde::Serialize;
use thiserror::Error;

/// Central tolerance table. Every numerical check in the crate reads from
/// here; the CLI can override the two knobs the checks are keyed on.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    /// Operator identity residuals (commutators, anticommutators, ladder
    /// chains).
    pub algebra: f64,
    /// Unitarity and Hermiticity checks, spectral comparisons.
    pub unitarity: f64,
    /// Norm and conserved-quantity drift along trajectories.
    pub conservation: f64,
    /// Agreement between subspace and full-space trajectories.
    pub frame: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebra: 1e-12,
            unitarity: 1e-10,
            conservation: 1e-10,
            frame: 1e-8,
        }
    }
}

/// Error type shared by the whole crate. The CLI maps variants onto process
/// exit codes: config problems exit 2, numerical contract violations exit 3,
/// verification failures exit 1.
#[derive(Debug, Error)]
pub enum PfError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("dimension {dim} exceeds the configured maximum {max}")]
    SizeLimit { dim: usize, max: usize },
    #[error("non-Hermitian input: relative residual {residual:.3e} exceeds {tol:.3e}")]
    NonHermitian { residual: f64, tol: f64 },
    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("verification failure: {0}")]
    Verification(String),
    #[error("numerical contract violation: {0}")]
    Contract(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PfError>;

impl PfError {
    /// Process exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> u8 {
        match self {
            PfError::Verification(_) => 1,
            PfError::InvalidArgument(_) | PfError::InvalidConfig(_) | PfError::Io(_) => 2,
            _ => 3,
        }
    }
}
