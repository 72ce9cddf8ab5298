use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::operator::SparseOp;
use super::space::FockSpace;
use crate::error::{Error, Result};

/// Tolerance on the norm (pure) or trace (mixed) of a valid state.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Allowed slack on negative density-matrix eigenvalues and on negative
/// variances before they are clamped to zero.
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum Representation {
    Pure(Vec<C64>),
    Mixed(DMatrix<C64>),
}

/// A normalized pure or mixed state on a [`FockSpace`].
///
/// Immutable once built. `tail_mass` records the probability lost to
/// truncation before renormalization (zero for states that fit exactly).
#[derive(Clone, Debug)]
pub struct QuantumState {
    space: FockSpace,
    repr: Representation,
    tail_mass: f64,
}

impl QuantumState {
    pub fn from_amplitudes(space: &FockSpace, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self {
            space: space.clone(),
            repr: Representation::Pure(amplitudes),
            tail_mass: 0.0,
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(space: &FockSpace, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Self::from_amplitudes(space, amplitudes)
    }

    pub fn from_density(space: &FockSpace, rho: DMatrix<C64>) -> Result<Self> {
        let dim = space.dim();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rho.nrows(),
            });
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > NORM_TOLERANCE || trace.im.abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let herm = (&rho - rho.adjoint())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if herm > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian (residual {herm:.3e})"
            )));
        }
        let min_eig = rho
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "density matrix has eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self {
            space: space.clone(),
            repr: Representation::Mixed(rho),
            tail_mass: 0.0,
        })
    }

    pub fn vacuum(space: &FockSpace) -> Self {
        let mut amps = vec![C64::default(); space.dim()];
        // Index 0 is the all-zero tuple in lexicographic order.
        amps[0] = C64::new(1.0, 0.0);
        Self {
            space: space.clone(),
            repr: Representation::Pure(amps),
            tail_mass: 0.0,
        }
    }

    /// The number state `|n₁, n₂, …⟩`.
    pub fn fock(space: &FockSpace, occupation: &[u16]) -> Result<Self> {
        let idx = space.index_of(occupation).ok_or_else(|| {
            Error::Capacity(format!("occupation {occupation:?} not in the basis"))
        })?;
        let mut amps = vec![C64::default(); space.dim()];
        amps[idx] = C64::new(1.0, 0.0);
        Self::from_amplitudes(space, amps)
    }

    /// Convex combination `Σ wₖ ρₖ`; weights are normalized to sum to one.
    pub fn mixture(components: &[(f64, QuantumState)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let space = first.1.space.clone();
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| *w < 0.0) || total <= 0.0 {
            return Err(Error::InvalidState(
                "mixture weights must be non-negative".into(),
            ));
        }
        let dim = space.dim();
        let mut rho = DMatrix::<C64>::zeros(dim, dim);
        for (w, state) in components {
            space.check_same(&state.space)?;
            rho += state.density_matrix() * C64::new(w / total, 0.0);
        }
        // A convex combination of valid states is positive; skip the
        // eigenvalue check.
        let mut mixed = Self {
            space,
            repr: Representation::Mixed(rho),
            tail_mass: 0.0,
        };
        mixed.tail_mass = components
            .iter()
            .map(|(w, s)| w / total * s.tail_mass)
            .sum();
        Ok(mixed)
    }

    pub(crate) fn with_tail_mass(mut self, tail_mass: f64) -> Self {
        self.tail_mass = tail_mass;
        self
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Representation::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match &self.repr {
            Representation::Pure(v) => Some(v),
            Representation::Mixed(_) => None,
        }
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn amplitude(&self, occupation: &[u16]) -> Option<C64> {
        let idx = self.space.index_of(occupation)?;
        self.amplitudes().map(|a| a[idx])
    }

    pub fn density_matrix(&self) -> DMatrix<C64> {
        match &self.repr {
            Representation::Pure(v) => {
                let dim = v.len();
                DMatrix::from_fn(dim, dim, |r, c| v[r] * v[c].conj())
            }
            Representation::Mixed(rho) => rho.clone(),
        }
    }

    /// Occupation-basis probabilities `⟨n|ρ|n⟩`.
    pub fn probabilities(&self) -> Vec<f64> {
        match &self.repr {
            Representation::Pure(v) => v.iter().map(|c| c.norm_sqr()).collect(),
            Representation::Mixed(rho) => (0..rho.nrows()).map(|i| rho[(i, i)].re).collect(),
        }
    }

    /// Eigen-decomposition into weighted pure components; a pure state is its
    /// own single component.
    pub fn pure_components(&self) -> Vec<(f64, Vec<C64>)> {
        match &self.repr {
            Representation::Pure(v) => vec![(1.0, v.clone())],
            Representation::Mixed(rho) => {
                let eig = rho.clone().symmetric_eigen();
                eig.eigenvalues
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 1e-14)
                    .map(|(k, &w)| (w, eig.eigenvectors.column(k).iter().copied().collect()))
                    .collect()
            }
        }
    }

    /// Multiplies a pure state by `e^{iγ}`; mixed states are unchanged.
    pub fn with_global_phase(&self, gamma: f64) -> Self {
        let mut out = self.clone();
        if let Representation::Pure(v) = &mut out.repr {
            let phase = C64::from_polar(1.0, gamma);
            v.iter_mut().for_each(|c| *c *= phase);
        }
        out
    }

    fn check_op(&self, op: &SparseOp) -> Result<()> {
        if op.dim() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: op.dim(),
            });
        }
        Ok(())
    }

    /// `⟨A⟩ = tr(ρA)`.
    pub fn expectation(&self, op: &SparseOp) -> Result<C64> {
        self.check_op(op)?;
        Ok(match &self.repr {
            Representation::Pure(v) => (0..v.len())
                .map(|r| v[r].conj() * op.row(r).map(|(c, a)| a * v[c]).sum::<C64>())
                .sum(),
            Representation::Mixed(rho) => (0..rho.nrows())
                .map(|r| op.row(r).map(|(c, a)| a * rho[(c, r)]).sum::<C64>())
                .sum(),
        })
    }

    /// `⟨A²⟩ − ⟨A⟩²` for Hermitian `A`, clamped at zero within tolerance.
    pub fn variance(&self, op: &SparseOp) -> Result<f64> {
        self.check_op(op)?;
        let mean = self.expectation(op)?;
        let second = match &self.repr {
            Representation::Pure(v) => op.apply(v).iter().map(|c| c.norm_sqr()).sum(),
            Representation::Mixed(_) => self.expectation(&op.matmul(op))?.re,
        };
        let scale = second.abs().max(1.0);
        if mean.im.abs() > POSITIVITY_TOLERANCE * scale {
            return Err(Error::NonReal(mean.im));
        }
        let var = second - mean.re * mean.re;
        if var < -POSITIVITY_TOLERANCE * scale {
            return Err(Error::Domain(format!(
                "negative variance {var:.3e}; operator is not Hermitian"
            )));
        }
        Ok(var.max(0.0))
    }
}
