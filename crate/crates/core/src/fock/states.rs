use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::operator::ModeOperators;
use super::space::FockSpace;
use super::state::{QuantumState, NORM_TOLERANCE};
use crate::error::{Error, Result};

/// Largest Poisson tail mass a coherent amplitude may lose to truncation.
pub const TRUNCATION_LIMIT: f64 = 1e-8;

/// Angles `(θ, φ, ψ₁, ψ₂)` parameterizing the unit vector `e` of a
/// three-mode field.
///
/// `θ` and `φ` set the amplitude split between the modes, `ψ₁` and `ψ₂` the
/// relative phases of modes 1 and 2 against mode 3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Su3Params {
    pub theta: f64,
    pub phi: f64,
    pub psi1: f64,
    pub psi2: f64,
}

impl Su3Params {
    pub fn new(theta: f64, phi: f64, psi1: f64, psi2: f64) -> Result<Self> {
        let p = Self {
            theta,
            phi,
            psi1,
            psi2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let amp = |name: &str, v: f64| {
            if (0.0..=FRAC_PI_2).contains(&v) {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} = {v} outside [0, π/2]")))
            }
        };
        let phase = |name: &str, v: f64| {
            if (0.0..2.0 * PI).contains(&v) {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} = {v} outside [0, 2π)")))
            }
        };
        amp("theta", self.theta)?;
        amp("phi", self.phi)?;
        phase("psi1", self.psi1)?;
        phase("psi2", self.psi2)
    }

    /// `e = (e^{iψ₁} sinθ cosφ, e^{iψ₂} sinθ sinφ, cosθ)`.
    pub fn unit_vector(&self) -> Result<[C64; 3]> {
        self.validate()?;
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Ok([
            C64::from_polar(st * cp, self.psi1),
            C64::from_polar(st * sp, self.psi2),
            C64::new(ct, 0.0),
        ])
    }
}

pub fn unit_vector(params: &Su3Params) -> Result<[C64; 3]> {
    params.unit_vector()
}

fn check_unit(e: &[C64]) -> Result<()> {
    let norm: f64 = e.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Domain(format!("Σ|eⱼ|² = {norm}, expected 1")));
    }
    Ok(())
}

fn check_modes(space: &FockSpace, found: usize) -> Result<()> {
    if space.n_modes() != found {
        return Err(Error::DimensionMismatch {
            expected: space.n_modes(),
            found,
        });
    }
    Ok(())
}

/// `P(X > k)` for `X ~ Poisson(mean)`, summed directly over the tail.
pub fn poisson_tail(mean: f64, k: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    if (k as f64) < mean {
        // the tail is O(1) here; sum the head downward from its largest term
        let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
        let mut term = (-mean + k as f64 * mean.ln() - ln_fact).exp();
        let mut head = 0.0;
        for n in (1..=k).rev() {
            head += term;
            term *= n as f64 / mean;
        }
        head += term;
        return (1.0 - head).clamp(0.0, 1.0);
    }
    let first = k + 1;
    let ln_fact: f64 = (1..=first).map(|i| (i as f64).ln()).sum();
    let mut term = (-mean + first as f64 * mean.ln() - ln_fact).exp();
    let mut sum = 0.0;
    let mut n = first;
    loop {
        sum += term;
        n += 1;
        term *= mean / n as f64;
        if (n as f64 > mean && term <= sum * 1e-17) || term == 0.0 {
            break;
        }
    }
    sum
}

/// Smallest cutoff whose Poisson tail for `mean` stays below
/// [`TRUNCATION_LIMIT`].
pub fn adequate_cutoff(mean: f64) -> usize {
    (0..)
        .find(|&k| poisson_tail(mean, k) < TRUNCATION_LIMIT)
        .expect("poisson tail vanishes")
}

/// Product of truncated Glauber states `|α₁⟩|α₂⟩…`, renormalized.
///
/// Fails with [`Error::Truncation`] when an amplitude, or the total photon
/// number under a cap, loses more than [`TRUNCATION_LIMIT`] of its Poisson
/// mass. The lost mass is kept as [`QuantumState::tail_mass`].
pub fn coherent_state(space: &FockSpace, alphas: &[C64]) -> Result<QuantumState> {
    check_modes(space, alphas.len())?;
    let cutoff = space.cutoff();
    for a in alphas {
        let tail = poisson_tail(a.norm_sqr(), cutoff);
        if tail >= TRUNCATION_LIMIT {
            return Err(Error::Truncation {
                tail_mass: tail,
                cutoff,
                limit: TRUNCATION_LIMIT,
            });
        }
    }
    if let Some(cap) = space.cap() {
        let total: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
        let tail = poisson_tail(total, cap);
        if tail >= TRUNCATION_LIMIT {
            return Err(Error::Truncation {
                tail_mass: tail,
                cutoff: cap,
                limit: TRUNCATION_LIMIT,
            });
        }
    }

    // cₙ = e^{-|α|²/2} αⁿ/√n!, per mode
    let per_mode: Vec<Vec<C64>> = alphas
        .iter()
        .map(|&a| {
            let mut c = Vec::with_capacity(cutoff + 1);
            c.push(C64::new((-a.norm_sqr() / 2.0).exp(), 0.0));
            for n in 1..=cutoff {
                let prev = c[n - 1];
                c.push(prev * a / (n as f64).sqrt());
            }
            c
        })
        .collect();

    let amps: Vec<C64> = space
        .iter()
        .map(|occ| {
            occ.iter()
                .zip(&per_mode)
                .map(|(&n, c)| c[n as usize])
                .product()
        })
        .collect();
    let kept: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    let state = QuantumState::normalized(space, amps)?;
    Ok(state.with_tail_mass((1.0 - kept).max(0.0)))
}

/// `|Ψ⟩_N = (N!)^{-1/2} (Σ eⱼ aⱼ⁺)^N |0⟩`, built by repeated application of
/// the composite creation operator.
pub fn psi_n_state(space: &FockSpace, e: &[C64], n: usize) -> Result<QuantumState> {
    check_modes(space, e.len())?;
    check_unit(e)?;
    if n > space.cutoff() || n > space.max_total() {
        return Err(Error::Capacity(format!(
            "{n} photons do not fit cutoff {} / cap {:?}",
            space.cutoff(),
            space.cap()
        )));
    }
    let raise = ModeOperators::new(space).creation_combination(e)?;
    let mut v = QuantumState::vacuum(space)
        .amplitudes()
        .expect("vacuum is pure")
        .to_vec();
    for k in 1..=n {
        v = raise.apply(&v);
        let inv = 1.0 / (k as f64).sqrt();
        v.iter_mut().for_each(|c| *c *= inv);
    }
    QuantumState::from_amplitudes(space, v)
}

/// Single-excitation W-state `e₁|100⟩ + e₂|010⟩ + e₃|001⟩`.
pub fn qutrit_w_state(space: &FockSpace, e: &[C64]) -> Result<QuantumState> {
    check_modes(space, 3)?;
    if e.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: e.len(),
        });
    }
    check_unit(e)?;
    let mut amps = vec![C64::default(); space.dim()];
    for (j, &ej) in e.iter().enumerate() {
        let mut occ = [0u16; 3];
        occ[j] = 1;
        let idx = space
            .index_of(&occ)
            .ok_or_else(|| Error::Capacity("space cannot hold one photon".into()))?;
        amps[idx] = ej;
    }
    QuantumState::from_amplitudes(space, amps)
}
