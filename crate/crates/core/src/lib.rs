//! Simulation of three-mode optical fields with SU(3) polarization symmetry.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`]: truncated multimode Fock spaces, sparse mode operators and
//!   states (coherent, N-photon `|Ψ⟩_N`, qutrit W-states, Fock, mixtures).
//! * [`su3`]: the nine Gell-Mann observables λ₀..λ₈ in the Schwinger
//!   representation, their statistics and the squeezing witness.
//! * [`polarimetry`]: coherency matrices, scalar invariants and the
//!   degrees of polarization P₂ and P₃.
//! * [`network`]: linear-optical mode networks, the twelve-port
//!   interferometer and exact photon-counting moments at its detectors.
//! * [`amplitude`]: the relative-amplitude observables S/C built from
//!   photon-number ratios and their counting statistics.

#![allow(clippy::needless_range_loop)]

pub mod amplitude;
pub mod error;
pub mod fock;
pub mod network;
pub mod polarimetry;
pub mod su3;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Crate version, recorded in result provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
