use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Fock cutoff cannot hold the requested amplitude without losing
    /// more than the allowed probability mass.
    #[error(
        "truncation error: tail mass {tail_mass:.3e} beyond cutoff {cutoff} exceeds {limit:.1e}"
    )]
    Truncation {
        tail_mass: f64,
        cutoff: usize,
        limit: f64,
    },

    /// The requested state or evolution does not fit into the basis.
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Degree of polarization asked for a field with zero intensity.
    #[error("polarization degree undefined for zero total intensity")]
    UndefinedDegree,

    #[error("statistics undefined: {0}")]
    UndefinedStatistics(String),

    /// A probe state touches the truncation boundary.
    #[error("probe state has amplitude in the top {layers} Fock layers")]
    BoundaryViolation { layers: usize },

    /// An expectation that must be real came out complex.
    #[error("expectation has imaginary part {0:.3e}")]
    NonReal(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
