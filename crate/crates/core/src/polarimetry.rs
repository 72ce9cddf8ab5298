//! Coherency matrices `Jᵢⱼ = ⟨aᵢ⁺aⱼ⟩`, their scalar invariants and the
//! degrees of polarization P₂ (two modes) and P₃ (three modes).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ModeOperators, QuantumState};
use crate::su3::{self, GellMannSet};

/// Max `|Jᵢⱼ − Jⱼᵢ*|` accepted between independently evaluated entries.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Relative tolerance for the invariant identities and for the complete
/// polarization test.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CoherencyMatrix {
    entries: DMatrix<C64>,
    /// Modes the rows refer to (0-based).
    modes: Vec<usize>,
    pub source: String,
}

impl CoherencyMatrix {
    /// Wraps a Hermitian matrix, symmetrizing round-off.
    pub fn from_entries(entries: DMatrix<C64>, source: impl Into<String>) -> Result<Self> {
        let n = entries.nrows();
        if n != entries.ncols() || !(n == 2 || n == 3) {
            return Err(Error::Domain(format!(
                "coherency matrix must be 2×2 or 3×3, got {n}"
            )));
        }
        let herm = (&entries - entries.adjoint())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::Domain(format!(
                "coherency matrix not Hermitian ({herm:.3e})"
            )));
        }
        let entries = (&entries + entries.adjoint()) * C64::new(0.5, 0.0);
        Ok(Self {
            modes: (0..n).collect(),
            entries,
            source: source.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn trace_pow(&self, k: u32) -> f64 {
        let mut p = self.entries.clone();
        for _ in 1..k {
            p = &p * &self.entries;
        }
        p.trace().re
    }

    pub fn det(&self) -> f64 {
        let m = &self.entries;
        match self.dim() {
            2 => (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re,
            _ => {
                (m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                    - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                    + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]))
                    .re
            }
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

fn coherency(state: &QuantumState, modes: &[usize], source: &str) -> Result<CoherencyMatrix> {
    let ops = ModeOperators::new(state.space());
    let n = modes.len();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (r, &i) in modes.iter().enumerate() {
        for (c, &j) in modes.iter().enumerate() {
            m[(r, c)] = state.expectation(&ops.hop(i, j)?)?;
        }
    }
    let mut cm = CoherencyMatrix::from_entries(m, source)?;
    cm.modes = modes.to_vec();
    Ok(cm)
}

/// The 3×3 coherency matrix over modes 1..3.
pub fn coherency3(state: &QuantumState) -> Result<CoherencyMatrix> {
    if state.space().n_modes() < 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: state.space().n_modes(),
        });
    }
    coherency(state, &[0, 1, 2], "coherency3")
}

/// The 2×2 coherency matrix of a pair of distinct modes.
pub fn coherency2(state: &QuantumState, pair: (usize, usize)) -> Result<CoherencyMatrix> {
    if pair.0 == pair.1 {
        return Err(Error::Domain(format!(
            "mode pair ({}, {}) is not distinct",
            pair.0, pair.1
        )));
    }
    let n = state.space().n_modes();
    if pair.0 >= n || pair.1 >= n {
        return Err(Error::Domain(format!(
            "mode pair {pair:?} outside {n} modes"
        )));
    }
    coherency(state, &[pair.0, pair.1], "coherency2")
}

/// `(⟨S₀⟩, ⟨S₁⟩, ⟨S₂⟩, ⟨S₃⟩)` of a 2×2 coherency matrix, with `S₁..S₃` the
/// two-mode operators `λ₁, λ₂, λ₃` and `S₀` the total intensity.
pub fn stokes_vector(j: &CoherencyMatrix) -> Result<[f64; 4]> {
    if j.dim() != 2 {
        return Err(Error::Domain(
            "Stokes vector needs a 2×2 coherency matrix".into(),
        ));
    }
    let m = j.entries();
    let (n1, n2, x) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    Ok([n1 + n2, 2.0 * x.re, 2.0 * x.im, n1 - n2])
}

/// `P₂ = (1 − 4 det J₂ / (Tr J₂)²)^{1/2}`.
pub fn degree_p2(j: &CoherencyMatrix) -> Result<f64> {
    if j.dim() != 2 {
        return Err(Error::Domain("P₂ needs a 2×2 coherency matrix".into()));
    }
    let tr = j.trace();
    if tr <= 0.0 {
        return Err(Error::UndefinedDegree);
    }
    Ok((1.0 - 4.0 * j.det() / (tr * tr)).max(0.0).sqrt())
}

/// `P₂ = |⟨S⃗⟩| / ⟨S₀⟩`.
pub fn degree_p2_stokes(stokes: &[f64; 4]) -> Result<f64> {
    if stokes[0] <= 0.0 {
        return Err(Error::UndefinedDegree);
    }
    Ok((stokes[1].powi(2) + stokes[2].powi(2) + stokes[3].powi(2)).sqrt() / stokes[0])
}

/// `P₃ = (√3/2) (Σⱼ₌₁⁸ ⟨λⱼ⟩²)^{1/2} / ⟨λ₀⟩`.
pub fn degree_p3_from_vector(lambda: &[f64; 9]) -> Result<f64> {
    if lambda[0] <= 0.0 {
        return Err(Error::UndefinedDegree);
    }
    let sq: f64 = lambda[1..].iter().map(|x| x * x).sum();
    Ok(3f64.sqrt() / 2.0 * sq.sqrt() / lambda[0])
}

/// P₃ obtained by solving `Tr J² = ((Tr J)²/3)(1 + 2P₃²)`; negative
/// round-off in P₃² is clamped to zero.
pub fn degree_p3_from_invariants(j: &CoherencyMatrix) -> Result<f64> {
    let tr = j.trace();
    if tr <= 0.0 {
        return Err(Error::UndefinedDegree);
    }
    let p_sq = (3.0 * j.trace_pow(2) / (tr * tr) - 1.0) / 2.0;
    Ok(p_sq.max(0.0).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationReport {
    pub trace: f64,
    pub det: f64,
    pub tr_sq: f64,
    pub tr_cube: f64,
    /// P₃ from the Gell-Mann mean vector.
    pub degree: f64,
    /// P₃ from the `Tr J²` invariant.
    pub degree_from_invariants: f64,
    /// `|Tr J³ − P₃²(Tr J)³ − 3 det J| / (Tr J)³`.
    pub cube_identity_residual: f64,
    /// `|Tr J² − (Tr J)²(1 + 2P₃²)/3| / (Tr J)²`.
    pub square_identity_residual: f64,
    /// `|det J| / (Tr J / 3)³`.
    pub det_residual: f64,
    pub identities_hold: bool,
    pub complete: bool,
}

/// Degree of polarization of a three-mode state plus the invariants of its
/// coherency matrix, with both invariant identities checked.
pub fn degree_p3(state: &QuantumState, set: &GellMannSet) -> Result<PolarizationReport> {
    let lambda = su3::gellmann_vector(state, set)?;
    let degree = degree_p3_from_vector(&lambda)?;
    let j = coherency3(state)?;
    report(&j, degree)
}

fn report(j: &CoherencyMatrix, degree: f64) -> Result<PolarizationReport> {
    let trace = j.trace();
    if trace <= 0.0 {
        return Err(Error::UndefinedDegree);
    }
    let det = j.det();
    let tr_sq = j.trace_pow(2);
    let tr_cube = j.trace_pow(3);
    let p2 = degree * degree;
    let cube_identity_residual = (tr_cube - p2 * trace.powi(3) - 3.0 * det).abs() / trace.powi(3);
    let square_identity_residual =
        (tr_sq - trace * trace / 3.0 * (1.0 + 2.0 * p2)).abs() / (trace * trace);
    let det_residual = det.abs() / (trace / 3.0).powi(3);
    let identities_hold = cube_identity_residual < IDENTITY_TOLERANCE
        && square_identity_residual < IDENTITY_TOLERANCE;
    let complete = det_residual < IDENTITY_TOLERANCE && (degree - 1.0).abs() < IDENTITY_TOLERANCE;
    Ok(PolarizationReport {
        trace,
        det,
        tr_sq,
        tr_cube,
        degree,
        degree_from_invariants: degree_p3_from_invariants(j)?,
        cube_identity_residual,
        square_identity_residual,
        det_residual,
        identities_hold,
        complete,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletePolarization {
    pub complete: bool,
    pub det_residual: f64,
    pub degree_residual: f64,
}

/// Complete polarization: `det J₃ = 0` and `P₃ = 1`, both within
/// [`IDENTITY_TOLERANCE`] (the determinant relative to `(Tr J₃/3)³`).
pub fn complete_polarization_test(state: &QuantumState) -> Result<CompletePolarization> {
    let set = su3::build_gellmann(state.space())?;
    let r = degree_p3(state, &set)?;
    Ok(CompletePolarization {
        complete: r.complete,
        det_residual: r.det_residual,
        degree_residual: (r.degree - 1.0).abs(),
    })
}
