use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::evolution::evolve;
use super::moments::SignalMoments;
use super::ModeNetwork;
use crate::error::{Error, Result};
use crate::fock::QuantumState;

/// Negative variances down to this are round-off and clamp to zero.
pub const VARIANCE_CLAMP: f64 = 1e-10;

/// Signal-mode input to a network; every other input port is vacuum.
#[derive(Clone, Debug)]
pub enum NetworkInput {
    /// Product of exact (untruncated) coherent states.
    Coherent(Vec<C64>),
    /// A Fock-space state on the signal modes.
    State(QuantumState),
    /// A Fock-space state on the first signal modes times coherent states on
    /// the rest.
    StateWithCoherent {
        state: QuantumState,
        alphas: Vec<C64>,
    },
}

impl NetworkInput {
    fn n_modes(&self) -> usize {
        match self {
            Self::Coherent(a) => a.len(),
            Self::State(s) => s.space().n_modes(),
            Self::StateWithCoherent { state, alphas } => state.space().n_modes() + alphas.len(),
        }
    }

    fn moments(&self) -> Result<SignalMoments> {
        match self {
            Self::Coherent(a) => Ok(SignalMoments::coherent(a)),
            Self::State(s) => SignalMoments::from_state(s),
            Self::StateWithCoherent { state, alphas } => {
                SignalMoments::from_state_with_coherent(state, alphas)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Heisenberg-picture transport of normally ordered signal moments.
    Moments,
    /// Full Schrödinger evolution of the Fock-space input.
    Fock,
    /// Moments for coherent inputs, Fock evolution for Fock-space states.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceStat {
    pub name: String,
    pub mean: f64,
    pub variance: f64,
}

/// Exact first and second moments of all detector counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionStats {
    pub backend: Backend,
    pub port_names: Vec<String>,
    pub port_means: Vec<f64>,
    /// `Cov(Nₖ, Nₗ)` in port order.
    pub port_covariance: Vec<Vec<f64>>,
    pub differences: Vec<DifferenceStat>,
}

impl DetectionStats {
    pub fn difference(&self, name: &str) -> Option<&DifferenceStat> {
        self.differences.iter().find(|d| d.name == name)
    }

    pub fn port_mean(&self, name: &str) -> Option<f64> {
        self.port_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.port_means[i])
    }

    pub fn total_mean(&self) -> f64 {
        self.port_means.iter().sum()
    }
}

/// Photon-count statistics at every detector of `network`.
pub fn detection_stats(
    network: &ModeNetwork,
    input: &NetworkInput,
    backend: Backend,
) -> Result<DetectionStats> {
    if input.n_modes() != network.n_signal() {
        return Err(Error::DimensionMismatch {
            expected: network.n_signal(),
            found: input.n_modes(),
        });
    }
    let resolved = match (backend, input) {
        (Backend::Auto, NetworkInput::State(_)) => Backend::Fock,
        (Backend::Auto, _) => Backend::Moments,
        (b, _) => b,
    };
    let ports: Vec<usize> = network.ports().iter().map(|(_, m)| *m).collect();
    let (means, second) = match resolved {
        Backend::Moments => moment_transport(network, &input.moments()?, &ports),
        Backend::Fock => match input {
            NetworkInput::State(state) => fock_counts(network, state, &ports)?,
            _ => {
                return Err(Error::Domain(
                    "Fock backend needs a Fock-space input state".into(),
                ))
            }
        },
        Backend::Auto => unreachable!("resolved above"),
    };

    let p = ports.len();
    let covariance: Vec<Vec<f64>> = (0..p)
        .map(|k| (0..p).map(|l| second[k][l] - means[k] * means[l]).collect())
        .collect();
    let index = |name: &str| -> Result<usize> {
        network
            .ports()
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::Domain(format!("no port named {name}")))
    };
    let mut differences = Vec::new();
    for d in network.differences() {
        let (i, j) = (index(&d.plus)?, index(&d.minus)?);
        let var = covariance[i][i] + covariance[j][j] - 2.0 * covariance[i][j];
        differences.push(DifferenceStat {
            name: d.name.clone(),
            mean: means[i] - means[j],
            variance: clamp_variance(var)?,
        });
    }
    Ok(DetectionStats {
        backend: resolved,
        port_names: network.ports().iter().map(|(n, _)| n.clone()).collect(),
        port_means: means,
        port_covariance: covariance,
        differences,
    })
}

fn clamp_variance(var: f64) -> Result<f64> {
    if var < -VARIANCE_CLAMP {
        return Err(Error::Domain(format!("negative count variance {var:.3e}")));
    }
    Ok(var.max(0.0))
}

/// `⟨Nₖ⟩ = Σ Uₖₐ* Uₖᵦ ⟨cₐ⁺cᵦ⟩` and
/// `⟨NₖNₗ⟩ = Σ Uₖₐ* Uₗ꜀* Uₖᵦ Uₗ𝒹 ⟨cₐ⁺c꜀⁺cᵦc𝒹⟩ + δₖₗ⟨Nₖ⟩`, with sums over
/// signal modes only: every normally ordered term with a vacuum operator
/// vanishes.
fn moment_transport(
    network: &ModeNetwork,
    moments: &SignalMoments,
    ports: &[usize],
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let u = network.unitary();
    let ns = moments.n_modes();
    let means: Vec<f64> = ports
        .iter()
        .map(|&k| {
            let mut s = C64::default();
            for a in 0..ns {
                for b in 0..ns {
                    s += u[(k, a)].conj() * u[(k, b)] * moments.g2(a, b);
                }
            }
            s.re
        })
        .collect();
    let second = ports
        .iter()
        .enumerate()
        .map(|(pk, &k)| {
            ports
                .iter()
                .map(|&l| {
                    let mut s = C64::default();
                    for a in 0..ns {
                        let ua = u[(k, a)].conj();
                        for c in 0..ns {
                            let uc = ua * u[(l, c)].conj();
                            for b in 0..ns {
                                let ub = uc * u[(k, b)];
                                for d in 0..ns {
                                    s += ub * u[(l, d)] * moments.g4(a, c, b, d);
                                }
                            }
                        }
                    }
                    if k == l {
                        s += means[pk];
                    }
                    s.re
                })
                .collect()
        })
        .collect();
    (means, second)
}

fn fock_counts(
    network: &ModeNetwork,
    state: &QuantumState,
    ports: &[usize],
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let out = evolve(network, state)?;
    let space = out.space();
    let p = ports.len();
    let mut means = vec![0.0; p];
    let mut second = vec![vec![0.0; p]; p];
    for (i, prob) in out.probabilities().into_iter().enumerate() {
        if prob == 0.0 {
            continue;
        }
        let occ = space.occupation(i);
        for (a, &k) in ports.iter().enumerate() {
            let nk = occ[k] as f64;
            means[a] += prob * nk;
            for (b, &l) in ports.iter().enumerate() {
                second[a][b] += prob * nk * occ[l] as f64;
            }
        }
    }
    Ok((means, second))
}

/// Largest absolute disagreement between two sets of statistics on the
/// same network.
pub fn backend_discrepancy(a: &DetectionStats, b: &DetectionStats) -> f64 {
    let means = a
        .port_means
        .iter()
        .zip(&b.port_means)
        .map(|(x, y)| (x - y).abs());
    let cov = a
        .port_covariance
        .iter()
        .flatten()
        .zip(b.port_covariance.iter().flatten())
        .map(|(x, y)| (x - y).abs());
    let diffs = a
        .differences
        .iter()
        .zip(&b.differences)
        .flat_map(|(x, y)| [(x.mean - y.mean).abs(), (x.variance - y.variance).abs()]);
    means.chain(cov).chain(diffs).fold(0.0, f64::max)
}
