//! Truncated Fock-space engine: bases, sparse mode operators, states and
//! their moments.

mod operator;
pub mod serial;
mod space;
mod state;
mod states;

pub use operator::{ModeOperators, SparseOp};
pub use serial::{SpaceRecord, StateKind, StateRecord};
pub use space::{FockSpace, MAX_DIM, MAX_MODES};
pub use state::{QuantumState, Representation, NORM_TOLERANCE, POSITIVITY_TOLERANCE};
pub use states::{
    adequate_cutoff, coherent_state, poisson_tail, psi_n_state, qutrit_w_state, unit_vector,
    Su3Params, TRUNCATION_LIMIT,
};

use crate::error::Result;

/// `⟨A⟩` of `op` in `state`.
pub fn expectation(state: &QuantumState, op: &SparseOp) -> Result<num_complex::Complex64> {
    state.expectation(op)
}

/// `⟨A²⟩ − ⟨A⟩²` of a Hermitian `op` in `state`.
pub fn variance(state: &QuantumState, op: &SparseOp) -> Result<f64> {
    state.variance(op)
}
