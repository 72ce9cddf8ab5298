use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{build_splitter, ModeNetwork};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, ModeOperators, QuantumState, SparseOp, MAX_MODES};

/// Largest output basis the Fock backend will allocate.
pub const FOCK_BACKEND_MAX_DIM: usize = 2_000_000;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Schrödinger-picture evolution of a signal state (vacuum on every ancilla)
/// through `network`.
///
/// The input is written as `P(c⁺)|0⟩` and each `cₘ⁺` is replaced by
/// `Σₖ Uₖₘ dₖ⁺`. The output lives on the photon sector of all network modes
/// bounded by the largest photon number in the input support.
pub fn evolve(network: &ModeNetwork, state: &QuantumState) -> Result<QuantumState> {
    let in_space = state.space();
    if in_space.n_modes() != network.n_signal() {
        return Err(Error::DimensionMismatch {
            expected: network.n_signal(),
            found: in_space.n_modes(),
        });
    }
    let n_total = network.n_total_modes();
    if n_total > MAX_MODES {
        return Err(Error::Capacity(format!(
            "{n_total}-mode network exceeds the Fock backend; use the moment backend"
        )));
    }
    let probs = state.probabilities();
    let max_photons = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, _)| in_space.total_photons(i))
        .max()
        .unwrap_or(0);
    let out_dim = binomial(max_photons + n_total, n_total);
    if out_dim > FOCK_BACKEND_MAX_DIM as f64 {
        return Err(Error::Capacity(format!(
            "output sector of {max_photons} photons in {n_total} modes has {out_dim:.3e} states; \
             use the moment backend"
        )));
    }
    let out_space = FockSpace::photon_sector(n_total, max_photons)?;
    let ops = ModeOperators::new(&out_space);
    let u = network.unitary();
    let raisers: Vec<SparseOp> = (0..network.n_signal())
        .map(|m| {
            let column: Vec<C64> = (0..n_total).map(|k| u[(k, m)]).collect();
            ops.creation_combination(&column)
        })
        .collect::<Result<_>>()?;

    let mut evolver = Evolver {
        in_space,
        out_dim: out_space.dim(),
        raisers: &raisers,
        prefix: Vec::with_capacity(in_space.n_modes()),
        amplitudes: &[],
    };
    let components = state.pure_components();
    let mut outputs = Vec::with_capacity(components.len());
    for (w, psi) in &components {
        evolver.amplitudes = psi;
        evolver.prefix.clear();
        let out = evolver
            .build(0)
            .unwrap_or_else(|| vec![C64::default(); out_space.dim()]);
        outputs.push((*w, out));
    }

    let evolved = if state.is_pure() {
        let (_, v) = outputs.pop().expect("pure state has one component");
        QuantumState::normalized(&out_space, v)?
    } else {
        let dim = out_space.dim();
        let mut rho = DMatrix::<C64>::zeros(dim, dim);
        for (w, v) in &outputs {
            rho += DMatrix::from_fn(dim, dim, |r, c| v[r] * v[c].conj()) * C64::new(*w, 0.0);
        }
        let tr = rho.trace().re;
        QuantumState::from_density(&out_space, rho / C64::new(tr, 0.0))?
    };
    Ok(evolved.with_tail_mass(state.tail_mass()))
}

struct Evolver<'a> {
    in_space: &'a FockSpace,
    out_dim: usize,
    raisers: &'a [SparseOp],
    prefix: Vec<u16>,
    amplitudes: &'a [C64],
}

impl Evolver<'_> {
    /// Nested Horner evaluation of `Σₙ ψ(n) Πₘ (Bₘ⁺)^{nₘ}/√nₘ! |0⟩` over the
    /// modes from `depth` on, with the earlier occupations fixed by `prefix`.
    /// `None` stands for an all-zero subtree.
    fn build(&mut self, depth: usize) -> Option<Vec<C64>> {
        let n_modes = self.in_space.n_modes();
        if depth == n_modes {
            let idx = self.in_space.index_of(&self.prefix)?;
            let amp = self.amplitudes[idx];
            if amp == C64::default() {
                return None;
            }
            let mut v = vec![C64::default(); self.out_dim];
            v[0] = amp;
            return Some(v);
        }
        let used: usize = self.prefix.iter().map(|&n| n as usize).sum();
        let budget = self.in_space.max_total().saturating_sub(used);
        let top = self.in_space.cutoff().min(budget);
        let mut acc: Option<Vec<C64>> = None;
        for k in (0..=top).rev() {
            if let Some(a) = acc.take() {
                let scale = 1.0 / ((k + 1) as f64).sqrt();
                let mut raised = self.raisers[depth].apply(&a);
                raised.iter_mut().for_each(|c| *c *= scale);
                acc = Some(raised);
            }
            self.prefix.push(k as u16);
            let child = self.build(depth + 1);
            self.prefix.pop();
            acc = match (acc, child) {
                (Some(mut a), Some(c)) => {
                    a.iter_mut().zip(&c).for_each(|(x, y)| *x += y);
                    Some(a)
                }
                (a, c) => a.or(c),
            };
        }
        acc
    }
}

/// Copies each of three input modes onto a balanced splitter against a
/// vacuum port. The result is a six-mode state over
/// `(a₁, a₂, a₃, a₁′, a₂′, a₃′)`; each copy carries half of the input
/// intensity.
pub fn splitter_stage(input: &QuantumState) -> Result<QuantumState> {
    if input.space().n_modes() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: input.space().n_modes(),
        });
    }
    evolve(&build_splitter(), input)
}
