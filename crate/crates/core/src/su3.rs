//! Gell-Mann observables of a three-mode field in the Schwinger
//! representation, `λⱼ = Σ (Gⱼ)ₐᵦ aₐ⁺ aᵦ`, and their statistics.

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, ModeOperators, QuantumState, SparseOp};
use crate::polarimetry;

/// Imaginary parts of Hermitian expectations above this are an error.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// The nine operators `λ₀..λ₈` on a space of at least three modes; modes
/// 0, 1, 2 play the roles of `a₁, a₂, a₃`.
#[derive(Clone, Debug)]
pub struct GellMannSet {
    space: FockSpace,
    operators: Vec<SparseOp>,
}

pub fn build_gellmann(space: &FockSpace) -> Result<GellMannSet> {
    if space.n_modes() < 3 {
        return Err(Error::Domain(format!(
            "Gell-Mann operators need 3 modes, space has {}",
            space.n_modes()
        )));
    }
    let ops = ModeOperators::new(space);
    let mut h = vec![vec![]; 3];
    for (i, row) in h.iter_mut().enumerate() {
        for j in 0..3 {
            row.push(ops.hop(i, j)?);
        }
    }
    let dim = space.dim();
    let lin = |terms: &[(C64, &SparseOp)]| SparseOp::combination(dim, terms);
    let inv_sqrt3 = C64::new(1.0 / 3f64.sqrt(), 0.0);

    let operators = vec![
        lin(&[(ONE, &h[0][0]), (ONE, &h[1][1]), (ONE, &h[2][2])]),
        lin(&[(ONE, &h[0][1]), (ONE, &h[1][0])]),
        lin(&[(I, &h[1][0]), (-I, &h[0][1])]),
        lin(&[(ONE, &h[0][0]), (-ONE, &h[1][1])]),
        lin(&[(ONE, &h[0][2]), (ONE, &h[2][0])]),
        lin(&[(I, &h[2][0]), (-I, &h[0][2])]),
        lin(&[(ONE, &h[1][2]), (ONE, &h[2][1])]),
        lin(&[(I, &h[2][1]), (-I, &h[1][2])]),
        lin(&[
            (inv_sqrt3, &h[0][0]),
            (inv_sqrt3, &h[1][1]),
            (-2.0 * inv_sqrt3, &h[2][2]),
        ]),
    ];
    Ok(GellMannSet {
        space: space.clone(),
        operators,
    })
}

impl GellMannSet {
    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn get(&self, j: usize) -> &SparseOp {
        &self.operators[j]
    }

    pub fn iter(&self) -> impl Iterator<Item = &SparseOp> {
        self.operators.iter()
    }

    /// Largest `max|λⱼ − λⱼ⁺|` over the set.
    pub fn hermiticity_residual(&self) -> f64 {
        self.operators
            .iter()
            .map(SparseOp::hermiticity_residual)
            .fold(0.0, f64::max)
    }

    fn check_state(&self, state: &QuantumState) -> Result<()> {
        if !self.space.same_as(state.space()) {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: state.space().dim(),
            });
        }
        Ok(())
    }
}

/// The 3×3 matrix `Gⱼ` with `λⱼ = a⁺ Gⱼ a`; `G₀` is the identity and
/// `G₁..G₈` are the standard Gell-Mann matrices.
pub fn gellmann_matrix(j: usize) -> Matrix3<C64> {
    let z = C64::default();
    let r = C64::new(1.0 / 3f64.sqrt(), 0.0);
    #[rustfmt::skip]
    let m = match j {
        0 => [ONE, z, z, z, ONE, z, z, z, ONE],
        1 => [z, ONE, z, ONE, z, z, z, z, z],
        2 => [z, -I, z, I, z, z, z, z, z],
        3 => [ONE, z, z, z, -ONE, z, z, z, z],
        4 => [z, z, ONE, z, z, z, ONE, z, z],
        5 => [z, z, -I, z, z, z, I, z, z],
        6 => [z, z, z, z, z, ONE, z, ONE, z],
        7 => [z, z, z, z, z, -I, z, I, z],
        8 => [r, z, z, z, r, z, z, z, -2.0 * r],
        _ => panic!("Gell-Mann index {j} out of range"),
    };
    Matrix3::from_row_slice(&m)
}

/// Totally antisymmetric su(3) structure constants `fᵢⱼₖ` over indices
/// 0..=8, with every entry touching index 0 equal to zero.
pub fn structure_constants() -> [[[f64; 9]; 9]; 9] {
    let h = 0.5;
    let s = 3f64.sqrt() / 2.0;
    let table = [
        (1, 2, 3, 1.0),
        (1, 4, 7, h),
        (1, 5, 6, -h),
        (2, 4, 6, h),
        (2, 5, 7, h),
        (3, 4, 5, h),
        (3, 6, 7, -h),
        (4, 5, 8, s),
        (6, 7, 8, s),
    ];
    let mut f = [[[0.0; 9]; 9]; 9];
    for (i, j, k, v) in table {
        for (a, b, c, sign) in [
            (i, j, k, 1.0),
            (j, k, i, 1.0),
            (k, i, j, 1.0),
            (j, i, k, -1.0),
            (i, k, j, -1.0),
            (k, j, i, -1.0),
        ] {
            f[a][b][c] = sign * v;
        }
    }
    f
}

/// `(⟨λ₀⟩, …, ⟨λ₈⟩)`.
pub fn gellmann_vector(state: &QuantumState, set: &GellMannSet) -> Result<[f64; 9]> {
    set.check_state(state)?;
    let mut out = [0.0; 9];
    for (j, op) in set.iter().enumerate() {
        let v = state.expectation(op)?;
        if v.im.abs() > IMAGINARY_TOLERANCE {
            return Err(Error::NonReal(v.im));
        }
        out[j] = v.re;
    }
    Ok(out)
}

/// `(⟨(Δλ₀)²⟩, …, ⟨(Δλ₈)²⟩)`.
pub fn gellmann_variances(state: &QuantumState, set: &GellMannSet) -> Result<[f64; 9]> {
    set.check_state(state)?;
    let mut out = [0.0; 9];
    for (j, op) in set.iter().enumerate() {
        out[j] = state.variance(op)?;
    }
    Ok(out)
}

/// Exact `⟨a⁺Ga⟩` and `⟨(Δ a⁺Ga)²⟩` in the (untruncated) coherent state
/// `|α⟩`: `α⁺Gα` and `α⁺G²α`.
pub fn coherent_moments(alpha: &[C64; 3], g: &Matrix3<C64>) -> (f64, f64) {
    let a = nalgebra::Vector3::from_column_slice(alpha);
    let mean = (a.adjoint() * g * a)[(0, 0)].re;
    let var = (a.adjoint() * g * g * a)[(0, 0)].re;
    (mean, var)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub index: usize,
    pub variance_state: f64,
    pub variance_coherent_ref: f64,
    /// `variance_state ≤ variance_coherent_ref` within tolerance.
    pub inequality_holds: bool,
    /// `variance_state` strictly below the reference, beyond tolerance.
    pub squeezed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingWitness {
    /// Amplitudes `αⱼ` of the matched coherent reference.
    pub reference: [C64; 3],
    pub records: Vec<WitnessRecord>,
}

/// Absolute slack used when comparing a variance against its coherent
/// reference.
pub const WITNESS_TOLERANCE: f64 = 1e-9;

/// Compares each `⟨(Δλⱼ)²⟩` of `state` with that of a coherent state with
/// the same mean photon number per mode and the same mode phases.
///
/// The reference amplitudes are `αⱼ = √⟨aⱼ⁺aⱼ⟩ · arg(eⱼ)`, with `e` the
/// leading eigenvector of the transposed coherency matrix. For states with a
/// rank-one coherency matrix `N e* eᵀ` (coherent, `|Ψ⟩_N`, W-states) this is
/// `αⱼ = √N eⱼ` up to a global phase, which no `λⱼ` sees.
pub fn squeezing_witness(state: &QuantumState, set: &GellMannSet) -> Result<SqueezingWitness> {
    set.check_state(state)?;
    let j = polarimetry::coherency3(state)?;
    let entries = j.entries();
    if entries.trace().re <= 0.0 {
        return Err(Error::UndefinedStatistics(
            "coherent reference undefined for zero photon number".into(),
        ));
    }
    let eig = entries.clone().symmetric_eigen();
    let lead = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(lead);
    let reference: [C64; 3] = std::array::from_fn(|k| {
        let mag = entries[(k, k)].re.max(0.0).sqrt();
        let e = v[k].conj();
        if e.norm() > 1e-12 {
            e / e.norm() * mag
        } else {
            C64::new(mag, 0.0)
        }
    });

    let variances = gellmann_variances(state, set)?;
    let records = (0..9)
        .map(|k| {
            let (_, var_ref) = coherent_moments(&reference, &gellmann_matrix(k));
            let var = variances[k];
            WitnessRecord {
                index: k,
                variance_state: var,
                variance_coherent_ref: var_ref,
                inequality_holds: var <= var_ref + WITNESS_TOLERANCE,
                squeezed: var < var_ref - WITNESS_TOLERANCE,
            }
        })
        .collect();
    Ok(SqueezingWitness { reference, records })
}

/// Number of top Fock layers a probe state must leave empty.
pub const PROBE_MARGIN: usize = 2;

fn check_probe(set: &GellMannSet, probe: &QuantumState) -> Result<()> {
    set.check_state(probe)?;
    let space = probe.space();
    let touches = probe
        .probabilities()
        .iter()
        .enumerate()
        .any(|(i, &p)| p > 0.0 && space.near_boundary(i, PROBE_MARGIN));
    if touches {
        return Err(Error::BoundaryViolation {
            layers: PROBE_MARGIN,
        });
    }
    Ok(())
}

fn probe_components(probes: &[QuantumState]) -> Vec<Vec<C64>> {
    probes
        .iter()
        .flat_map(QuantumState::pure_components)
        .map(|(_, psi)| psi)
        .collect()
}

/// Largest `‖R ψ‖` over probe components, which bounds `|⟨R⟩|`.
fn residual_on(components: &[Vec<C64>], residual: &SparseOp) -> f64 {
    components
        .iter()
        .map(|psi| {
            residual
                .apply(psi)
                .iter()
                .map(|c| c.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Max residual of `[λᵢ, λⱼ] = 2i Σₖ fᵢⱼₖ λₖ` over all index pairs, with the
/// tabulated structure constants.
pub fn structure_constant_check(set: &GellMannSet, probes: &[QuantumState]) -> Result<f64> {
    for p in probes {
        check_probe(set, p)?;
    }
    let components = probe_components(probes);
    let f = structure_constants();
    let dim = set.space.dim();
    let mut worst: f64 = 0.0;
    for i in 0..9 {
        for j in (i + 1)..9 {
            let mut terms: Vec<(C64, &SparseOp)> = Vec::new();
            for (k, op) in set.iter().enumerate() {
                if f[i][j][k] != 0.0 {
                    terms.push((C64::new(0.0, -2.0 * f[i][j][k]), op));
                }
            }
            let comm = set.get(i).commutator(set.get(j));
            terms.push((ONE, &comm));
            let residual = SparseOp::combination(dim, &terms);
            worst = worst.max(residual_on(&components, &residual));
        }
    }
    Ok(worst)
}

/// Max residual of `[λᵢ, λⱼ] = a⁺ [Gᵢ, Gⱼ] a`, comparing the Fock-space
/// commutator with the image of the 3×3 matrix commutator. Needs no
/// structure constants.
pub fn commutator_closure_check(set: &GellMannSet, probes: &[QuantumState]) -> Result<f64> {
    for p in probes {
        check_probe(set, p)?;
    }
    let components = probe_components(probes);
    let ops = ModeOperators::new(&set.space);
    let mut hops = Vec::with_capacity(9);
    for a in 0..3 {
        for b in 0..3 {
            hops.push(ops.hop(a, b)?);
        }
    }
    let dim = set.space.dim();
    let mut worst: f64 = 0.0;
    for i in 0..9 {
        for j in (i + 1)..9 {
            let (gi, gj) = (gellmann_matrix(i), gellmann_matrix(j));
            let c = gi * gj - gj * gi;
            let mut terms: Vec<(C64, &SparseOp)> = Vec::new();
            for a in 0..3 {
                for b in 0..3 {
                    if c[(a, b)] != C64::default() {
                        terms.push((-c[(a, b)], &hops[3 * a + b]));
                    }
                }
            }
            let comm = set.get(i).commutator(set.get(j));
            terms.push((ONE, &comm));
            let residual = SparseOp::combination(dim, &terms);
            worst = worst.max(residual_on(&components, &residual));
        }
    }
    Ok(worst)
}
