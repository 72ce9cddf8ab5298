use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{ModeOperators, QuantumState, SparseOp};

/// Normally ordered second and fourth moments of the signal modes:
/// `⟨cₐ⁺c_b⟩` and `⟨cₐ⁺c_c⁺c_b c_d⟩`.
///
/// These are all a linear network needs to give exact means and covariances
/// of photon counts when the remaining inputs are vacuum.
#[derive(Clone, Debug)]
pub struct SignalMoments {
    n: usize,
    g2: Vec<C64>,
    g4: Vec<C64>,
}

impl SignalMoments {
    pub fn n_modes(&self) -> usize {
        self.n
    }

    /// `⟨cₐ⁺ c_b⟩`
    pub fn g2(&self, a: usize, b: usize) -> C64 {
        self.g2[a * self.n + b]
    }

    /// `⟨cₐ⁺ c_c⁺ c_b c_d⟩`
    pub fn g4(&self, a: usize, c: usize, b: usize, d: usize) -> C64 {
        let n = self.n;
        self.g4[((a * n + c) * n + b) * n + d]
    }

    /// Exact moments of the product coherent state `|α₁⟩|α₂⟩…`.
    pub fn coherent(alphas: &[C64]) -> Self {
        Self::tabulate(alphas.len(), |cre, ann| {
            let c: C64 = cre.iter().map(|&k| alphas[k].conj()).product();
            let a: C64 = ann.iter().map(|&k| alphas[k]).product();
            c * a
        })
    }

    /// Moments of a Fock-space state, evaluated as overlaps of lowered
    /// vectors `⟨Πaₓ ψ | Πa_y ψ⟩`; annihilators never leave the basis, so
    /// these are exact for the stored state.
    pub fn from_state(state: &QuantumState) -> Result<Self> {
        Self::from_state_with_coherent(state, &[])
    }

    /// Moments of `ρ ⊗ |β₁⟩|β₂⟩…`: the state occupies the first modes, the
    /// coherent amplitudes the following ones.
    pub fn from_state_with_coherent(state: &QuantumState, betas: &[C64]) -> Result<Self> {
        let k = state.space().n_modes();
        let lowered = Lowered::new(state)?;
        let n = k + betas.len();
        let mut failure = None;
        let out = Self::tabulate(n, |cre, ann| {
            let mut factor = C64::new(1.0, 0.0);
            let mut cre_s = Vec::new();
            let mut ann_s = Vec::new();
            for &m in cre {
                if m < k {
                    cre_s.push(m);
                } else {
                    factor *= betas[m - k].conj();
                }
            }
            for &m in ann {
                if m < k {
                    ann_s.push(m);
                } else {
                    factor *= betas[m - k];
                }
            }
            match lowered.moment(&cre_s, &ann_s) {
                Ok(v) => factor * v,
                Err(e) => {
                    failure = Some(e);
                    C64::default()
                }
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    fn tabulate(n: usize, mut f: impl FnMut(&[usize], &[usize]) -> C64) -> Self {
        let mut g2 = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                g2.push(f(&[a], &[b]));
            }
        }
        let mut g4 = Vec::with_capacity(n.pow(4));
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        g4.push(f(&[a, c], &[b, d]));
                    }
                }
            }
        }
        Self { n, g2, g4 }
    }
}

/// Weighted pure components with their once- and twice-lowered vectors.
struct Lowered {
    n: usize,
    components: Vec<Component>,
}

struct Component {
    weight: f64,
    psi: Vec<C64>,
    once: Vec<Vec<C64>>,
    /// `a_x a_y ψ` at `x * n + y`.
    twice: Vec<Vec<C64>>,
}

impl Lowered {
    fn new(state: &QuantumState) -> Result<Self> {
        let ops = ModeOperators::new(state.space());
        let n = state.space().n_modes();
        let lowers: Vec<SparseOp> = (0..n).map(|m| ops.annihilation(m)).collect::<Result<_>>()?;
        let components = state
            .pure_components()
            .into_iter()
            .map(|(weight, psi)| {
                let once: Vec<Vec<C64>> = lowers.iter().map(|a| a.apply(&psi)).collect();
                let mut twice = Vec::with_capacity(n * n);
                for x in 0..n {
                    for y in 0..n {
                        twice.push(lowers[x].apply(&once[y]));
                    }
                }
                Component {
                    weight,
                    psi,
                    once,
                    twice,
                }
            })
            .collect();
        Ok(Self { n, components })
    }

    fn moment(&self, cre: &[usize], ann: &[usize]) -> Result<C64> {
        let mut total = C64::default();
        for c in &self.components {
            let pick = |idx: &[usize]| -> Result<&Vec<C64>> {
                Ok(match idx {
                    [] => &c.psi,
                    [x] => &c.once[*x],
                    [x, y] => &c.twice[x * self.n + y],
                    _ => {
                        return Err(Error::Domain(
                            "moments above fourth order are not tabulated".into(),
                        ))
                    }
                })
            };
            let left = pick(cre)?;
            let right = pick(ann)?;
            let overlap: C64 = left.iter().zip(right).map(|(l, r)| l.conj() * r).sum();
            total += overlap * c.weight;
        }
        Ok(total)
    }
}
