use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::build_twelve_port;
use super::detection::{detection_stats, Backend, NetworkInput};
use super::moments::SignalMoments;
use crate::error::{Error, Result};
use crate::fock::{ModeOperators, QuantumState};
use crate::polarimetry::{self, CoherencyMatrix};

/// Quadrature estimates read off the twelve-port differences with mode 3
/// acting as local oscillator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomodyneEstimates {
    /// Phase `ϕ` of the control amplitude `α₃ = |α₃|e^{iϕ}`.
    pub control_phase: f64,
    pub q1: f64,
    pub p1: f64,
    pub q2: f64,
    pub p2: f64,
    /// `⟨N⁻₁₃⟩, ⟨N⁻₂₃⟩` at `φ₁ = φ₃ = 0` and at `φ₁ = φ₃ = π/2`.
    pub raw_differences: [f64; 4],
    /// P₃ of the combined signal and control field.
    pub degree_p3: f64,
}

/// Measures the quadratures of a two-mode signal against a coherent control
/// field in mode 3, via the moment backend.
///
/// With `α₃ = |α₃|e^{iϕ}`: `⟨N⁻₁₃⟩ = ½|α₃|(⟨q₁⟩cosφ₁ − ⟨p₁⟩sinφ₁)` and
/// `⟨N⁻₂₃⟩ = ½|α₃|(⟨q₂⟩cosφ₃ + ⟨p₂⟩sinφ₃)`, so the settings `φ₁ = φ₃ = 0`
/// and `φ₁ = φ₃ = π/2` give all four quadratures.
pub fn homodyne_limit(signal_12: &QuantumState, control: C64) -> Result<HomodyneEstimates> {
    if signal_12.space().n_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: signal_12.space().n_modes(),
        });
    }
    let amp = control.norm();
    if amp == 0.0 {
        return Err(Error::Domain("control amplitude is zero".into()));
    }
    let input = NetworkInput::StateWithCoherent {
        state: signal_12.clone(),
        alphas: vec![control],
    };
    let measure = |phi: f64| -> Result<(f64, f64)> {
        let net = build_twelve_port([phi, 0.0, phi]);
        let st = detection_stats(&net, &input, Backend::Moments)?;
        let n13 = st.difference("N13").expect("twelve-port has N13").mean;
        let n23 = st.difference("N23").expect("twelve-port has N23").mean;
        Ok((n13, n23))
    };
    let (n13_q, n23_q) = measure(0.0)?;
    let (n13_p, n23_p) = measure(FRAC_PI_2)?;

    let moments = SignalMoments::from_state_with_coherent(signal_12, &[control])?;
    let j = DMatrix::from_fn(3, 3, |a, b| moments.g2(a, b));
    let j = CoherencyMatrix::from_entries(j, "homodyne")?;
    let lambda: [f64; 9] = std::array::from_fn(|k| {
        let g = crate::su3::gellmann_matrix(k);
        let mut s = C64::default();
        for a in 0..3 {
            for b in 0..3 {
                s += g[(a, b)] * j.entries()[(a, b)];
            }
        }
        s.re
    });

    Ok(HomodyneEstimates {
        control_phase: control.arg(),
        q1: 2.0 * n13_q / amp,
        p1: -2.0 * n13_p / amp,
        q2: 2.0 * n23_q / amp,
        p2: 2.0 * n23_p / amp,
        raw_differences: [n13_q, n23_q, n13_p, n23_p],
        degree_p3: polarimetry::degree_p3_from_vector(&lambda)?,
    })
}

/// Direct expectations `(⟨q₁⟩, ⟨p₁⟩, ⟨q₂⟩, ⟨p₂⟩)` of a two-mode state with
/// `qⱼ = aⱼe^{−iϕ} + aⱼ⁺e^{iϕ}` and `pⱼ = i(aⱼ⁺e^{iϕ} − aⱼe^{−iϕ})`.
pub fn quadratures(state: &QuantumState, phase: f64) -> Result<[f64; 4]> {
    let ops = ModeOperators::new(state.space());
    let rot = C64::from_polar(1.0, -phase);
    let mut out = [0.0; 4];
    for j in 0..2 {
        let z = state.expectation(&ops.annihilation(j)?)? * rot;
        out[2 * j] = 2.0 * z.re;
        out[2 * j + 1] = 2.0 * z.im;
    }
    Ok(out)
}
