//! Stabilizer codes on asymmetric Pauli channels: construction, evaluation,
//! and optimization.
//!
//! The crate is organized bottom-up:
//!
//! * [`gf2poly`]: binary polynomial arithmetic and divisors of `x^n + 1`.
//! * [`pauli`]: phase-free Pauli vectors, stabilizers, syndromes, distance,
//!   structure classification, and qubit-permutation equivalence.
//! * [`channel`]: Pauli channel families parameterized by error rate and bias.
//! * [`errorset`]: probability-ordered truncated error sets.
//! * [`fer`]: frame-error-rate estimators over an error set, with relative
//!   error bounds and adaptive refinement.
//! * [`cyclic`]: enumeration of additive cyclic codes and their stabilizers.
//! * [`search`]: randomized hill climbing over stabilizer codes.
//! * [`cli`]: command implementations behind the `stabopt` binary.

pub mod channel;
pub mod cli;
pub mod cyclic;
pub mod errorset;
pub mod fer;
pub mod gf2poly;
pub mod numeric;
pub mod pauli;
pub mod search;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Channel parameters admit no physical realization.
    #[error("unsatisfiable channel: {0}")]
    UnsatisfiableChannel(String),
    /// A structural constraint admits no stabilizer with the requested
    /// parameters, or bounded random retries were exhausted trying to
    /// satisfy it.
    #[error("infeasible constraint: {0}")]
    InfeasibleConstraint(String),
    /// An error-set or evaluation budget was exhausted before the requested
    /// precision was reached. Carries the best estimate obtained before
    /// running out, when one exists.
    #[error("budget exceeded: {message}")]
    BudgetExceeded {
        message: String,
        partial: Option<Box<fer::FerEstimate>>,
    },
    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal consistency: {0}")]
    InternalConsistency(String),
    /// Input or output failure in the CLI layer.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
