mod common;

use nalgebra::Matrix3;
use proptest::prelude::*;
use su3pol::fock::{
    coherent_state, qutrit_w_state, FockSpace, ModeOperators, QuantumState, Su3Params,
};
use su3pol::network::{
    backend_discrepancy, build_parallel_measurement, build_splitter, build_twelve_port,
    detection_stats, Backend, NetworkInput, TwelvePortPhases, PHASES_IMAGINARY, PHASES_REAL,
};
use su3pol::su3::{build_gellmann, coherent_moments, gellmann_vector};
use su3pol::C64;

const PAIRS: [(&str, usize, usize, usize, f64); 3] = [
    // (difference, i, j, phase slot, sign of the phase in λᵢⱼ)
    ("N12", 0, 1, 1, 1.0),
    ("N13", 0, 2, 0, -1.0),
    ("N23", 1, 2, 2, 1.0),
];

/// `G` with `λᵢⱼ = a⁺ G a = e^{iχ} aᵢ⁺aⱼ + h.c.`
fn lambda_ij_matrix(i: usize, j: usize, chi: f64) -> Matrix3<C64> {
    let mut g = Matrix3::zeros();
    g[(i, j)] = C64::from_polar(1.0, chi);
    g[(j, i)] = C64::from_polar(1.0, -chi);
    g
}

/// Checks `⟨N⁻ᵢⱼ⟩ = ½⟨λᵢⱼ⟩` and `Var N⁻ᵢⱼ = ¼Var λᵢⱼ + ¼(⟨nᵢ⟩ + ⟨nⱼ⟩)`
/// given a routine producing `(⟨λᵢⱼ⟩, Var λᵢⱼ, ⟨nᵢ⟩ + ⟨nⱼ⟩)`.
fn check_battery(
    input: &NetworkInput,
    backend: Backend,
    phases: TwelvePortPhases,
    lambda: impl Fn(usize, usize, f64) -> (f64, f64, f64),
) {
    let st = detection_stats(&build_twelve_port(phases), input, backend).unwrap();
    for (name, i, j, slot, sign) in PAIRS {
        let (mean, var, n) = lambda(i, j, sign * phases[slot]);
        let d = st.difference(name).unwrap();
        assert!(
            (d.mean - mean / 2.0).abs() < 1e-9,
            "{name} mean {} vs {}",
            d.mean,
            mean / 2.0
        );
        assert!(
            (d.variance - var / 4.0 - n / 4.0).abs() < 1e-9,
            "{name} variance {} vs {}",
            d.variance,
            var / 4.0 + n / 4.0
        );
    }
}

fn fock_oracle(state: &QuantumState) -> impl Fn(usize, usize, f64) -> (f64, f64, f64) + '_ {
    move |i, j, chi| {
        let ops = ModeOperators::new(state.space());
        let hop = ops.hop(i, j).unwrap().scale(C64::from_polar(1.0, chi));
        let lam = hop.add(&hop.adjoint());
        let n = state.expectation(&ops.number(i).unwrap()).unwrap().re
            + state.expectation(&ops.number(j).unwrap()).unwrap().re;
        (
            state.expectation(&lam).unwrap().re,
            state.variance(&lam).unwrap(),
            n,
        )
    }
}

#[test]
fn two_photon_fock_battery() {
    let s = FockSpace::photon_sector(3, 2).unwrap();
    let st = QuantumState::fock(&s, &[1, 1, 0]).unwrap();
    for phases in [PHASES_REAL, PHASES_IMAGINARY, [0.3, -1.2, 2.0]] {
        for backend in [Backend::Fock, Backend::Moments] {
            check_battery(
                &NetworkInput::State(st.clone()),
                backend,
                phases,
                fock_oracle(&st),
            );
        }
    }
}

#[test]
fn settings_select_gellmann_components() {
    let s = FockSpace::photon_sector(3, 1).unwrap();
    let e = Su3Params::new(0.9, 0.6, 1.3, 2.2)
        .unwrap()
        .unit_vector()
        .unwrap();
    let st = qutrit_w_state(&s, &e).unwrap();
    let lam = gellmann_vector(&st, &build_gellmann(&s).unwrap()).unwrap();
    let input = NetworkInput::State(st);
    for (phases, idx) in [(PHASES_REAL, [1, 4, 6]), (PHASES_IMAGINARY, [2, 5, 7])] {
        let stats = detection_stats(&build_twelve_port(phases), &input, Backend::Fock).unwrap();
        for ((name, ..), k) in PAIRS.iter().zip(idx) {
            let d = stats.difference(name).unwrap();
            assert!((d.mean - lam[k] / 2.0).abs() < 1e-12, "{name} ↔ λ{k}");
        }
    }
}

#[test]
fn phi2_sweep_traces_cosine_law() {
    let alphas = vec![C64::new(0.8, 0.3), C64::new(-0.4, 0.9), C64::new(0.2, 0.1)];
    let arr = [alphas[0], alphas[1], alphas[2]];
    let l1 = coherent_moments(&arr, &su3pol::su3::gellmann_matrix(1)).0;
    let l2 = coherent_moments(&arr, &su3pol::su3::gellmann_matrix(2)).0;
    for k in 0..24 {
        let phi2 = k as f64 * 0.27;
        let st = detection_stats(
            &build_twelve_port([0.0, phi2, 0.0]),
            &NetworkInput::Coherent(alphas.clone()),
            Backend::Moments,
        )
        .unwrap();
        let expect = 0.5 * (l1 * phi2.cos() - l2 * phi2.sin());
        assert!((st.difference("N12").unwrap().mean - expect).abs() < 1e-12);
    }
}

#[test]
fn parallel_network_is_unitary_and_conserves_photons() {
    let net = build_parallel_measurement(PHASES_REAL, PHASES_IMAGINARY);
    assert!(net.unitarity_residual() < 1e-12);
    let alphas = vec![C64::new(1.0, 0.5), C64::new(0.0, -0.7), C64::new(0.3, 0.3)];
    let total: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
    let st = detection_stats(&net, &NetworkInput::Coherent(alphas), Backend::Moments).unwrap();
    assert!((st.total_mean() - total).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coherent_battery(a in prop::array::uniform3(common::complex())) {
        // oracle: ⟨λ⟩ = α⁺Gα, Var λ = α⁺G²α
        let oracle = |i: usize, j: usize, chi: f64| {
            let (m, v) = coherent_moments(&a, &lambda_ij_matrix(i, j, chi));
            (m, v, a[i].norm_sqr() + a[j].norm_sqr())
        };
        for phases in [PHASES_REAL, PHASES_IMAGINARY] {
            check_battery(&NetworkInput::Coherent(a.to_vec()), Backend::Moments, phases, oracle);
        }
    }

    #[test]
    fn w_state_battery((t, f, p1, p2) in common::angles()) {
        let s = FockSpace::photon_sector(3, 1).unwrap();
        let e = Su3Params::new(t, f, p1, p2).unwrap().unit_vector().unwrap();
        let st = qutrit_w_state(&s, &e).unwrap();
        for phases in [PHASES_REAL, PHASES_IMAGINARY] {
            for backend in [Backend::Fock, Backend::Moments] {
                check_battery(&NetworkInput::State(st.clone()), backend, phases, fock_oracle(&st));
            }
        }
    }

    #[test]
    fn vacuum_ancillas_add_no_mean(st in common::mixed_state(&FockSpace::new(3, 1).unwrap(), 1, 2)) {
        // ⟨N⁻ᵢⱼ⟩ − ½⟨λᵢⱼ⟩ = ⟨Mᵢⱼ⟩
        let oracle = fock_oracle(&st);
        for phases in [PHASES_REAL, PHASES_IMAGINARY] {
            let stats = detection_stats(&build_twelve_port(phases), &NetworkInput::State(st.clone()), Backend::Fock).unwrap();
            for (name, i, j, slot, sign) in PAIRS {
                let m = stats.difference(name).unwrap().mean - oracle(i, j, sign * phases[slot]).0 / 2.0;
                prop_assert!(m.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn photon_number_conserved(st in common::mixed_state(&FockSpace::new(3, 1).unwrap(), 1, 2)) {
        let n_in = st.expectation(&ModeOperators::new(st.space()).total_number()).unwrap().re;
        for net in [build_twelve_port(PHASES_REAL), build_splitter()] {
            for backend in [Backend::Fock, Backend::Moments] {
                let out = detection_stats(&net, &NetworkInput::State(st.clone()), backend).unwrap();
                prop_assert!((out.total_mean() - n_in).abs() < 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn backends_agree_on_coherent_inputs(a in prop::array::uniform3(common::complex())) {
        // |α|² ≤ 2 in total, per-mode cutoff 12
        let norm: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let scale = if norm > 2f64.sqrt() { 2f64.sqrt() / norm } else { 1.0 };
        let a: Vec<C64> = a.iter().map(|x| x * scale).collect();
        let s = FockSpace::with_cap(3, 12, 15).unwrap();
        let st = coherent_state(&s, &a).unwrap();
        let net = build_twelve_port(PHASES_IMAGINARY);
        let exact = detection_stats(&net, &NetworkInput::Coherent(a), Backend::Moments).unwrap();
        let fock = detection_stats(&net, &NetworkInput::State(st.clone()), Backend::Fock).unwrap();
        let moments = detection_stats(&net, &NetworkInput::State(st), Backend::Moments).unwrap();
        prop_assert!(backend_discrepancy(&exact, &fock) < 1e-6);
        prop_assert!(backend_discrepancy(&fock, &moments) < 1e-9);
    }
}
