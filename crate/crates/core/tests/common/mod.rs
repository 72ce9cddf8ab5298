#![allow(dead_code)]

use proptest::prelude::*;
use su3pol::fock::{FockSpace, QuantumState};
use su3pol::C64;

pub fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

/// A normalized random pure state on `space`, supported only on occupation
/// tuples with every `nⱼ ≤ max_n`.
pub fn pure_state(space: &FockSpace, max_n: u16) -> impl Strategy<Value = QuantumState> {
    let space = space.clone();
    prop::collection::vec(complex(), space.dim())
        .prop_filter("non-zero", |v| {
            v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3
        })
        .prop_map(move |mut v| {
            for (i, c) in v.iter_mut().enumerate() {
                if space.occupation(i).iter().any(|&n| n > max_n) {
                    *c = C64::default();
                }
            }
            if v.iter().all(|c| c.norm_sqr() == 0.0) {
                v[0] = C64::new(1.0, 0.0);
            }
            QuantumState::normalized(&space, v).unwrap()
        })
}

/// Mixture of `k` random pure states with random weights.
pub fn mixed_state(space: &FockSpace, max_n: u16, k: usize) -> impl Strategy<Value = QuantumState> {
    (
        prop::collection::vec(pure_state(space, max_n), k),
        prop::collection::vec(0.05f64..1.0, k),
    )
        .prop_map(|(states, weights)| {
            let total: f64 = weights.iter().sum();
            let parts: Vec<(f64, QuantumState)> =
                weights.iter().map(|w| w / total).zip(states).collect();
            QuantumState::mixture(&parts).unwrap()
        })
}

/// Angles `(θ, φ, ψ₁, ψ₂)` in their canonical ranges.
pub fn angles() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    use std::f64::consts::{FRAC_PI_2, TAU};
    (0.0..=FRAC_PI_2, 0.0..=FRAC_PI_2, 0.0..TAU, 0.0..TAU)
}

/// `⟨aᵢ⁺aⱼ⟩` from the raw amplitude vector, independent of the library's
/// operator code.
pub fn bilinear(state: &QuantumState, i: usize, j: usize) -> C64 {
    let space = state.space();
    let rho = state.density_matrix();
    let mut s = C64::default();
    for c in 0..space.dim() {
        let occ = space.occupation(c);
        if occ[j] == 0 {
            continue;
        }
        let mut lowered = occ.to_vec();
        let mut f = (lowered[j] as f64).sqrt();
        lowered[j] -= 1;
        lowered[i] += 1;
        f *= (lowered[i] as f64).sqrt();
        if let Some(r) = space.index_of(&lowered) {
            // ⟨aᵢ⁺aⱼ⟩ = Σ ρ(c, r) ⟨r|aᵢ⁺aⱼ|c⟩
            s += rho[(c, r)] * f;
        }
    }
    s
}
