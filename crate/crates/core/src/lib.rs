//! Error suppression for reversible quantum algorithms by repeated adjoint cycles.
//!
//! A reversible algorithm maps the all-zero register to a marked basis label
//! `y`; its adjoint maps `y` back to zero. When each application depolarizes
//! the output register with probability `p`, running the forward algorithm
//! once, copying the result onto an ancilla register, and then cycling
//! `k - 1` times through (adjoint, post-select on the zero register, restore
//! from the ancilla) drives the weight of every wrong label down to
//! `(p/2^N)^k` while the correct label keeps `(1 - (2^N-1)p/2^N)^k`.
//!
//! The crate provides four independent routes to the same numbers:
//!
//! - [`state`] + [`channel`] + [`protocol`]: exact sparse simulation of the
//!   scheme as a classical mixture over pairs of basis labels.
//! - [`analytic`]: closed-form error rate, absorption probability, and
//!   expected repetitions, with log-domain companions that stay finite far
//!   past double-precision underflow.
//! - [`montecarlo`]: reproducible single-shot trajectory sampling.
//! - [`dm_oracle`]: a dense density-matrix implementation used as a
//!   brute-force cross-check of the sparse fast path.

pub mod analytic;
pub mod channel;
pub mod dm_oracle;
pub mod montecarlo;
pub mod protocol;
pub mod state;

use thiserror::Error;

/// Largest register width accepted by the sparse simulation path.
pub const MAX_QUBITS: u32 = 12;

/// Largest register width accepted by the dense density-matrix oracle
/// (joint dimension `4^N` = 4096).
pub const DM_MAX_QUBITS: u32 = 6;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register width must be in 1..={max}, got {got}")]
    QubitCountOutOfRange { got: u32, max: u32 },
    #[error("probability must be a finite value in [0, 1], got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("application count k must be at least 1")]
    ZeroApplications,
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error("basis label {value} does not fit in {n_qubits} qubit(s)")]
    LabelOutOfRange { value: u64, n_qubits: u32 },
    #[error("completion must be a permutation of 0..2^N mapping 0 to the marked label")]
    InvalidCompletion,
    #[error("state weight {0} is negative or non-finite")]
    InvalidWeight(f64),
    #[error("state mass {0} differs from 1 beyond tolerance")]
    UnnormalizedState(f64),
    #[error("no output obtainable: all probability mass has been absorbed")]
    AllAbsorbed,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub use analytic::{branch_weights, epsilon, expected_runs, zeta, AnalyticPoint, BranchWeights};
pub use channel::{apply_adjoint_and_absorb, apply_cnot1, apply_cnot2, apply_forward_qa};
pub use montecarlo::{estimate, sample_trajectory, McEstimate, TrajectoryOutcome};
pub use protocol::{
    run_scheme, sweep, verify_against_analytic, CycleStats, SchemeResult, VerifyReport,
};
pub use state::{BasisLabel, Completion, DiagonalState, Register, SchemeParams};
