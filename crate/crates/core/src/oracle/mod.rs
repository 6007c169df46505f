//! Dense numerical ground truth for stabilizer schemes, plus generic
//! non-stabilizer reference states.
//!
//! Every numeric routine respects an amplitude budget (default `2^23`,
//! overridable through the `ESS_BUDGET` environment variable). Work that
//! would exceed it fails with [`OracleError::Budget`] and is reported as
//! skipped by the verification entry points.

pub mod dense;
pub mod group;
pub mod haar;
pub mod verify;

use thiserror::Error;

use crate::pauli::PauliError;

pub use dense::{epr_extractable, local_unitary_fidelity, schmidt_spectrum, Spectrum, StateVector, C64};
pub use group::{reduced_density_from_group, state_from_group, DensityMatrix, GroupState, NumericState};
pub use haar::{explicit_three_qubit_state, haar_known_scheme, nonstab_unknown_scheme, Ancilla, NonStabReport};
pub use verify::{verify_scheme_numerically, NumericReport, Status};

pub const DEFAULT_BUDGET: usize = 1 << 23;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{what} of size {requested} exceeds the budget of {budget}")]
    Budget { what: String, requested: String, budget: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Amplitude budget, from `ESS_BUDGET` when set.
pub fn amplitude_budget() -> usize {
    std::env::var("ESS_BUDGET").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}
