//! Built-in verification run: the headline identities and values on fixed,
//! deterministic inputs.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;
use su3pol::amplitude::{
    amplitude_statistics, counting_distribution, linearized_variances, weak_field_statistics,
    ConditioningPolicy,
};
use su3pol::fock::{
    adequate_cutoff, coherent_state, psi_n_state, qutrit_w_state, FockSpace, ModeOperators,
    QuantumState, Su3Params,
};
use su3pol::network::{
    build_twelve_port, detection_stats, homodyne_limit, quadratures, Backend, NetworkInput,
    PHASES_IMAGINARY, PHASES_REAL,
};
use su3pol::polarimetry::{complete_polarization_test, degree_p3};
use su3pol::su3::{
    build_gellmann, commutator_closure_check, gellmann_variances, squeezing_witness,
    structure_constant_check,
};
use su3pol::{Result, C64};

use crate::experiment::{Compared, Row};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub group: &'static str,
    pub name: &'static str,
    pub value: f64,
    /// Pass when `value ≤ bound` (or `≥` for lower bounds).
    pub bound: f64,
    pub lower_bound: bool,
}

impl Check {
    fn upper(group: &'static str, name: &'static str, value: f64, bound: f64) -> Self {
        Self {
            group,
            name,
            value,
            bound,
            lower_bound: false,
        }
    }

    fn lower(group: &'static str, name: &'static str, value: f64, bound: f64) -> Self {
        Self {
            lower_bound: true,
            ..Self::upper(group, name, value, bound)
        }
    }

    pub fn passed(&self) -> bool {
        if self.lower_bound {
            self.value >= self.bound
        } else {
            self.value <= self.bound
        }
    }

    pub fn row(&self) -> Row {
        Row {
            state: String::new(),
            setting: self.group.to_string(),
            observable: self.name.to_string(),
            mean: Some(self.value),
            variance: None,
            reference_value: Some(self.bound),
            compared: Some(Compared::Mean),
            residual: Some(if self.passed() {
                0.0
            } else {
                (self.value - self.bound).abs()
            }),
            provenance: if self.passed() {
                "selftest:pass"
            } else {
                "selftest:FAIL"
            },
        }
    }
}

fn unit(theta: f64, phi: f64, psi1: f64, psi2: f64) -> Result<[C64; 3]> {
    Su3Params::new(theta, phi, psi1, psi2)?.unit_vector()
}

/// Fixed angle grid covering the canonical ranges.
fn angle_grid() -> Vec<(f64, f64, f64, f64)> {
    let mut out = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            for psi1 in [0.0, 2.1, 4.2] {
                for psi2 in [0.7, 3.3] {
                    out.push((
                        i as f64 * FRAC_PI_2 / 4.0,
                        j as f64 * FRAC_PI_2 / 4.0,
                        psi1,
                        psi2,
                    ));
                }
            }
        }
    }
    out
}

fn algebra() -> Result<Vec<Check>> {
    let s = FockSpace::new(3, 4)?;
    let set = build_gellmann(&s)?;
    let mut probes = vec![
        QuantumState::fock(&s, &[1, 1, 0])?,
        QuantumState::fock(&s, &[2, 0, 1])?,
    ];
    for (t, f) in [(0.3, 1.2), (0.9553, FRAC_PI_4), (1.4, 0.2)] {
        probes.push(psi_n_state(&s, &unit(t, f, 0.5, 2.5)?, 2)?);
    }
    let half = probes[2].clone();
    probes.push(QuantumState::mixture(&[
        (0.5, half),
        (0.5, probes[0].clone()),
    ])?);
    Ok(vec![
        Check::upper(
            "algebra",
            "hermiticity_residual",
            set.hermiticity_residual(),
            1e-10,
        ),
        Check::upper(
            "algebra",
            "commutator_closure_residual",
            commutator_closure_check(&set, &probes)?,
            1e-10,
        ),
        Check::upper(
            "algebra",
            "structure_constant_residual",
            structure_constant_check(&set, &probes)?,
            1e-10,
        ),
    ])
}

fn squeezing() -> Result<Vec<Check>> {
    let mut worst_l0: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut samples = 0usize;
    for n in 1..=3 {
        let s = FockSpace::new(3, n)?;
        let set = build_gellmann(&s)?;
        for (t, f, p1, p2) in angle_grid() {
            let st = psi_n_state(&s, &unit(t, f, p1, p2)?, n)?;
            worst_l0 = worst_l0.max(gellmann_variances(&st, &set)?[0].abs());
            for r in &squeezing_witness(&st, &set)?.records[1..] {
                worst_excess = worst_excess.max(r.variance_state - r.variance_coherent_ref);
            }
            samples += 1;
        }
    }
    Ok(vec![
        Check::upper("squeezing", "lambda0_variance", worst_l0, 1e-12),
        Check::lower("squeezing", "witness_samples", samples as f64, 200.0),
        Check::upper(
            "squeezing",
            "witness_max_excess",
            worst_excess,
            su3pol::su3::WITNESS_TOLERANCE,
        ),
    ])
}

fn polarization() -> Result<Vec<Check>> {
    let mut worst_degree: f64 = 0.0;
    let mut worst_det: f64 = 0.0;
    let s = FockSpace::new(3, 3)?;
    let sc = FockSpace::with_cap(3, 12, 12)?;
    for (t, f) in [(0.2, 0.3), (0.9553, FRAC_PI_4), (1.3, 1.1)] {
        let e = unit(t, f, 1.0, 2.0)?;
        let alphas: Vec<C64> = e.iter().map(|x| x * 0.9).collect();
        for st in [
            coherent_state(&sc, &alphas)?,
            psi_n_state(&s, &e, 2)?,
            psi_n_state(&s, &e, 3)?,
            qutrit_w_state(&s, &e)?,
        ] {
            let c = complete_polarization_test(&st)?;
            worst_degree = worst_degree.max(c.degree_residual);
            worst_det = worst_det.max(c.det_residual);
        }
    }
    // identities on mixtures of non-commuting pure states
    let set = build_gellmann(&s)?;
    let mut worst_identity: f64 = 0.0;
    let mut worst_consistency: f64 = 0.0;
    let mut k = 0.0;
    for (t, f, p1, p2) in angle_grid().into_iter().step_by(3) {
        k += 1.0;
        let a = psi_n_state(&s, &unit(t, f, p1, p2)?, 2)?;
        let b = qutrit_w_state(&s, &unit(f, t, p2, p1)?)?;
        let c = QuantumState::fock(&s, &[1, 0, 2])?;
        let w = 0.1 + 0.8 * (k * 0.37f64).fract();
        let mix = QuantumState::mixture(&[(w * 0.5, a), (w * 0.5, b), (1.0 - w, c)])?;
        let r = degree_p3(&mix, &set)?;
        worst_identity = worst_identity
            .max(r.cube_identity_residual)
            .max(r.square_identity_residual);
        worst_consistency =
            worst_consistency.max((r.degree - r.degree_from_invariants).abs() / r.degree.max(1e-3));
    }
    Ok(vec![
        Check::upper("polarization", "complete_P3_residual", worst_degree, 1e-9),
        Check::upper("polarization", "complete_det_residual", worst_det, 1e-9),
        Check::upper(
            "polarization",
            "mixed_identity_residual",
            worst_identity,
            1e-9,
        ),
        Check::upper(
            "polarization",
            "P3_invariant_consistency",
            worst_consistency,
            1e-9,
        ),
    ])
}

fn interferometer() -> Result<Vec<Check>> {
    let s1 = FockSpace::photon_sector(3, 1)?;
    let s2 = FockSpace::photon_sector(3, 2)?;
    let states = vec![
        qutrit_w_state(&s1, &unit(0.9553, FRAC_PI_4, 0.0, 0.0)?)?,
        qutrit_w_state(&s1, &unit(0.4, 1.1, 2.0, 5.0)?)?,
        QuantumState::fock(&s2, &[1, 1, 0])?,
        psi_n_state(&s2, &unit(1.0, 0.6, 0.3, 4.0)?, 2)?,
    ];
    let mut worst_mean: f64 = 0.0;
    let mut worst_var: f64 = 0.0;
    for phases in [PHASES_REAL, PHASES_IMAGINARY] {
        let net = build_twelve_port(phases);
        let chis = [phases[1], -phases[0], phases[2]];
        for st in &states {
            let stats = detection_stats(&net, &NetworkInput::State(st.clone()), Backend::Fock)?;
            let ops = ModeOperators::new(st.space());
            for (k, (name, i, j)) in [("N12", 0, 1), ("N13", 0, 2), ("N23", 1, 2)]
                .into_iter()
                .enumerate()
            {
                let hop = ops.hop(i, j)?.scale(C64::from_polar(1.0, chis[k]));
                let lam = hop.add(&hop.adjoint());
                let n = st.expectation(&ops.number(i)?)?.re + st.expectation(&ops.number(j)?)?.re;
                let d = stats.difference(name).expect("difference");
                worst_mean = worst_mean.max((d.mean - st.expectation(&lam)?.re / 2.0).abs());
                worst_var = worst_var.max((d.variance - st.variance(&lam)? / 4.0 - n / 4.0).abs());
            }
        }
    }
    Ok(vec![
        Check::upper(
            "interferometer",
            "difference_mean_residual",
            worst_mean,
            1e-9,
        ),
        Check::upper(
            "interferometer",
            "difference_variance_residual",
            worst_var,
            1e-9,
        ),
    ])
}

fn homodyne() -> Result<Vec<Check>> {
    let s = FockSpace::new(2, adequate_cutoff(0.13))?;
    let signal = coherent_state(&s, &[C64::new(0.3, 0.2), C64::default()])?;
    let h = homodyne_limit(&signal, C64::new(10.0, 0.0))?;
    let direct = quadratures(&signal, h.control_phase)?;
    let err = [h.q1, h.p1, h.q2, h.p2]
        .iter()
        .zip(direct)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        Check::upper("homodyne", "quadrature_residual", err, 1e-8),
        Check::lower("homodyne", "strong_oscillator_P3", h.degree_p3, 0.99),
    ])
}

fn amplitude() -> Result<Vec<Check>> {
    let s = FockSpace::photon_sector(3, 1)?;
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        // θ = 0 leaves the φ pair undefined, so the grid starts just inside
        let theta = (i as f64 + 0.5) * FRAC_PI_2 / 50.0;
        for j in 0..50 {
            let phi = j as f64 * FRAC_PI_2 / 49.0;
            let st = qutrit_w_state(&s, &unit(theta, phi, 0.0, 0.0)?)?;
            let v = weak_field_statistics(&st)?.variances();
            let p = 0.25 * (2.0 * phi).sin().powi(2);
            let t = 0.25 * (2.0 * theta).sin().powi(2);
            for (got, want) in v.iter().zip([p, p, t, t]) {
                worst = worst.max((got - want).abs());
            }
        }
    }
    let sym = weak_field_statistics(&qutrit_w_state(&s, &unit(FRAC_PI_4, FRAC_PI_4, 0.0, 0.0)?)?)?;
    let sym_err = sym
        .variances()
        .iter()
        .map(|v| (v - 0.25).abs())
        .fold(0.0, f64::max);
    let max_ent = weak_field_statistics(&qutrit_w_state(
        &s,
        &unit((1.0f64 / 3.0).sqrt().acos(), FRAC_PI_4, 0.0, 0.0)?,
    )?)?;
    let ent_err = (max_ent.s_theta.variance - 2.0 / 9.0)
        .abs()
        .max((max_ent.c_theta.variance - 2.0 / 9.0).abs());
    let f = FockSpace::new(3, 3)?;
    let mut fock_var: f64 = 0.0;
    for occ in [[2, 1, 0], [1, 1, 1], [3, 0, 2]] {
        let d = counting_distribution(&QuantumState::fock(&f, &occ)?)?;
        let st = amplitude_statistics(&d, ConditioningPolicy::ExcludeUndefined)?;
        fock_var = fock_var.max(st.variances().iter().fold(0.0, |a, b| a.max(b.abs())));
    }
    Ok(vec![
        Check::upper("amplitude", "weak_field_grid_residual", worst, 1e-12),
        Check::upper(
            "amplitude",
            "symmetric_qutrit_quarter_residual",
            sym_err,
            1e-12,
        ),
        Check::upper(
            "amplitude",
            "max_entangled_two_ninths_residual",
            ent_err,
            1e-12,
        ),
        Check::upper("amplitude", "fock_variance", fock_var, 0.0),
    ])
}

/// Largest relative gap between linearized and exact variances for a
/// coherent field with `n` mean photons in each mode.
pub fn linearization_gap(n: f64) -> Result<f64> {
    let s = FockSpace::new(3, adequate_cutoff(n))?;
    let alpha = C64::new(n.sqrt(), 0.0);
    let st = coherent_state(&s, &[alpha; 3])?;
    let dist = counting_distribution(&st)?;
    let exact = amplitude_statistics(&dist, ConditioningPolicy::ExcludeUndefined)?.variances();
    let lin = linearized_variances([n; 3], [n; 3])?;
    Ok(exact
        .iter()
        .zip(lin)
        .map(|(e, l)| (l - e).abs() / e)
        .fold(0.0, f64::max))
}

fn linearization() -> Result<Vec<Check>> {
    let gaps = [5.0, 10.0, 25.0, 50.0]
        .iter()
        .map(|&n| linearization_gap(n))
        .collect::<Result<Vec<_>>>()?;
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    Ok(vec![
        Check::upper("linearization", "relative_gap_n25", gaps[2], 0.05),
        Check::lower(
            "linearization",
            "gap_monotone",
            if monotone { 1.0 } else { 0.0 },
            1.0,
        ),
    ])
}

pub fn run_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for part in [
        algebra as fn() -> Result<Vec<Check>>,
        squeezing,
        polarization,
        interferometer,
        homodyne,
        amplitude,
        linearization,
    ] {
        out.extend(part()?);
    }
    Ok(out)
}
