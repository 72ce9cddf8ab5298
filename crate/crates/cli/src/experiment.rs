//! Builds the configured state and runs one analysis on it.

use serde::Serialize;
use su3pol::amplitude::{
    counting_distribution, linearized_variances, observable_statistics, AmplitudeObservable,
};
use su3pol::fock::{
    adequate_cutoff, coherent_state, poisson_tail, psi_n_state, qutrit_w_state, FockSpace,
    ModeOperators, QuantumState, StateRecord, Su3Params,
};
use su3pol::network::{
    build_twelve_port, detection_stats, homodyne_limit, parallel_estimates, quadratures, Backend,
    NetworkInput,
};
use su3pol::polarimetry::{coherency2, coherency3, degree_p2, degree_p3};
use su3pol::su3::{build_gellmann, gellmann_matrix, squeezing_witness};
use su3pol::{Error, Result, C64};

use crate::config::{Analysis, Angles, ExperimentConfig, Scheme, SpaceSpec, StateSpec};

/// What a row's `reference_value` is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Compared {
    Mean,
    Variance,
}

/// One output row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub state: String,
    pub setting: String,
    pub observable: String,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub reference_value: Option<f64>,
    pub compared: Option<Compared>,
    pub residual: Option<f64>,
    pub provenance: &'static str,
}

impl Row {
    fn new(observable: impl Into<String>, provenance: &'static str) -> Self {
        Self {
            state: String::new(),
            setting: String::new(),
            observable: observable.into(),
            mean: None,
            variance: None,
            reference_value: None,
            compared: None,
            residual: None,
            provenance,
        }
    }

    fn mean(mut self, v: f64) -> Self {
        self.mean = Some(v);
        self
    }

    fn variance(mut self, v: f64) -> Self {
        self.variance = Some(v);
        self
    }

    /// Attaches a reference value and the absolute residual against the
    /// chosen column.
    fn reference(mut self, r: Option<f64>, against: Compared) -> Self {
        if let Some(r) = r {
            let got = match against {
                Compared::Mean => self.mean,
                Compared::Variance => self.variance,
            };
            self.reference_value = Some(r);
            self.compared = Some(against);
            self.residual = got.map(|g| (g - r).abs());
        }
        self
    }
}

/// Rows plus the metadata that goes into the provenance header.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub rows: Vec<Row>,
    /// Probability mass lost to Fock truncation.
    pub tail_mass: f64,
    pub notes: Vec<String>,
}

fn params(a: &Angles) -> Result<Su3Params> {
    Su3Params::new(a.theta, a.phi, a.psi1, a.psi2)
}

fn n_modes(spec: &StateSpec) -> Result<usize> {
    match spec {
        StateSpec::Coherent { alphas } => Ok(alphas.len()),
        StateSpec::PsiN { .. } | StateSpec::Qutrit { .. } => Ok(3),
        StateSpec::Fock { occupation } => Ok(occupation.len()),
        StateSpec::Mixture { components } => {
            let first = components
                .first()
                .ok_or_else(|| Error::Domain("mixture without components".into()))?;
            let n = n_modes(&first.state)?;
            for c in components {
                if n_modes(&c.state)? != n {
                    return Err(Error::Domain(
                        "mixture components differ in mode count".into(),
                    ));
                }
            }
            Ok(n)
        }
    }
}

/// Tail mass the automatic cutoff aims for. Much tighter than the hard
/// truncation limit, so printed values for coherent fields are not visibly
/// shifted by the renormalization.
const AUTO_TAIL: f64 = 1e-13;

/// Smallest per-mode cutoff that holds the state.
fn auto_cutoff(spec: &StateSpec) -> usize {
    let c = match spec {
        StateSpec::Coherent { alphas } => alphas
            .iter()
            .map(|a| {
                let mean = a.0.norm_sqr();
                (adequate_cutoff(mean)..)
                    .find(|&k| poisson_tail(mean, k) < AUTO_TAIL)
                    .expect("poisson tail vanishes")
            })
            .max()
            .unwrap_or(0),
        StateSpec::PsiN { n, .. } => *n,
        StateSpec::Qutrit { .. } => 1,
        StateSpec::Fock { occupation } => occupation.iter().copied().max().unwrap_or(0) as usize,
        StateSpec::Mixture { components } => components
            .iter()
            .map(|c| auto_cutoff(&c.state))
            .max()
            .unwrap_or(0),
    };
    c.max(1)
}

pub fn build_space(spec: &StateSpec, space: &SpaceSpec) -> Result<FockSpace> {
    let n = n_modes(spec)?;
    let cutoff = space.cutoff.unwrap_or_else(|| auto_cutoff(spec));
    match space.cap {
        Some(cap) => FockSpace::with_cap(n, cutoff, cap),
        None => FockSpace::new(n, cutoff),
    }
}

fn state_on(space: &FockSpace, spec: &StateSpec) -> Result<QuantumState> {
    match spec {
        StateSpec::Coherent { alphas } => {
            let a: Vec<C64> = alphas.iter().map(|a| a.0).collect();
            coherent_state(space, &a)
        }
        StateSpec::PsiN { angles, n } => psi_n_state(space, &params(angles)?.unit_vector()?, *n),
        StateSpec::Qutrit { angles } => qutrit_w_state(space, &params(angles)?.unit_vector()?),
        StateSpec::Fock { occupation } => QuantumState::fock(space, occupation),
        StateSpec::Mixture { components } => {
            let parts = components
                .iter()
                .map(|c| Ok((c.weight, state_on(space, &c.state)?)))
                .collect::<Result<Vec<_>>>()?;
            QuantumState::mixture(&parts)
        }
    }
}

pub fn build_state(spec: &StateSpec, space: &SpaceSpec) -> Result<QuantumState> {
    state_on(&build_space(spec, space)?, spec)
}

/// `⟨aᵢ⁺aⱼ⟩` when it is known in closed form.
fn closed_form_coherency(spec: &StateSpec) -> Result<Option<[[C64; 3]; 3]>> {
    let amplitudes: Option<([C64; 3], f64)> = match spec {
        StateSpec::Coherent { alphas } if alphas.len() == 3 => {
            Some(([alphas[0].0, alphas[1].0, alphas[2].0], 1.0))
        }
        StateSpec::PsiN { angles, n } => Some((params(angles)?.unit_vector()?, *n as f64)),
        StateSpec::Qutrit { angles } => Some((params(angles)?.unit_vector()?, 1.0)),
        StateSpec::Fock { occupation } if occupation.len() == 3 => {
            let mut j = [[C64::default(); 3]; 3];
            for (k, &n) in occupation.iter().enumerate() {
                j[k][k] = C64::new(n as f64, 0.0);
            }
            return Ok(Some(j));
        }
        _ => None,
    };
    Ok(amplitudes.map(|(a, scale)| {
        std::array::from_fn(|i| std::array::from_fn(|k| a[i].conj() * a[k] * scale))
    }))
}

/// `⟨λₖ⟩ = Σ Gₖ[a,b] ⟨aₐ⁺aᵦ⟩`.
fn contract(k: usize, j: &[[C64; 3]; 3]) -> f64 {
    let g = gellmann_matrix(k);
    let mut s = C64::default();
    for a in 0..3 {
        for b in 0..3 {
            s += g[(a, b)] * j[a][b];
        }
    }
    s.re
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    let label = config.state.label();
    let mut outcome = match config.analysis {
        Analysis::Interferometer => interferometer(config)?,
        other => {
            let state = build_state(&config.state, &config.space)?;
            let mut o = match other {
                Analysis::State => state_rows(&state, config)?,
                Analysis::Gellmann => gellmann(&state, config)?,
                Analysis::Polarization => polarization(&state, config)?,
                Analysis::Amplitude => amplitude(&state, config)?,
                Analysis::Interferometer => unreachable!(),
            };
            o.tail_mass = state.tail_mass();
            o
        }
    };
    for r in &mut outcome.rows {
        r.state = label.to_string();
    }
    Ok(outcome)
}

/// The state's portable record.
pub fn state_record(config: &ExperimentConfig) -> Result<StateRecord> {
    Ok(StateRecord::from_state(&build_state(
        &config.state,
        &config.space,
    )?))
}

fn state_rows(state: &QuantumState, config: &ExperimentConfig) -> Result<Outcome> {
    let space = state.space();
    let ops = ModeOperators::new(space);
    let mut rows = Vec::new();
    for m in 0..space.n_modes() {
        let n = ops.number(m)?;
        let reference = match &config.state {
            StateSpec::Coherent { alphas } => Some(alphas[m].0.norm_sqr()),
            StateSpec::Fock { occupation } => Some(occupation[m] as f64),
            _ => None,
        };
        rows.push(
            Row::new(format!("n{}", m + 1), "fock::expectation")
                .mean(state.expectation(&n)?.re)
                .variance(state.variance(&n)?)
                .reference(reference, Compared::Mean),
        );
    }
    let total = ops.total_number();
    rows.push(
        Row::new("n_total", "fock::expectation")
            .mean(state.expectation(&total)?.re)
            .variance(state.variance(&total)?),
    );
    rows.push(Row::new("dimension", "fock::FockSpace").mean(space.dim() as f64));
    rows.push(Row::new("tail_mass", "fock::coherent_state").mean(state.tail_mass()));
    Ok(Outcome {
        rows,
        ..Outcome::default()
    })
}

fn gellmann(state: &QuantumState, config: &ExperimentConfig) -> Result<Outcome> {
    let set = build_gellmann(state.space())?;
    let j = closed_form_coherency(&config.state)?;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let witness = match squeezing_witness(state, &set) {
        Ok(w) => Some(w),
        Err(Error::UndefinedStatistics(msg)) => {
            notes.push(format!("squeezing witness skipped: {msg}"));
            None
        }
        Err(e) => return Err(e),
    };
    let means = su3pol::su3::gellmann_vector(state, &set)?;
    let vars = su3pol::su3::gellmann_variances(state, &set)?;
    for k in 0..9 {
        let reference = j.as_ref().map(|j| contract(k, j));
        rows.push(
            Row::new(format!("lambda{k}"), "su3::gellmann_vector")
                .mean(means[k])
                .variance(vars[k])
                .reference(reference, Compared::Mean),
        );
    }
    if let Some(w) = witness {
        for r in &w.records {
            // mean: coherent-reference variance minus the state's; ≥ 0 when
            // the inequality holds
            rows.push(
                Row::new(
                    format!("squeezing_margin_lambda{}", r.index),
                    "su3::squeezing_witness",
                )
                .mean(r.variance_coherent_ref - r.variance_state)
                .variance(r.variance_state)
                .reference(Some(r.variance_coherent_ref), Compared::Variance),
            );
        }
    }
    Ok(Outcome {
        rows,
        notes,
        ..Outcome::default()
    })
}

fn polarization(state: &QuantumState, config: &ExperimentConfig) -> Result<Outcome> {
    let set = build_gellmann(state.space())?;
    let r = degree_p3(state, &set)?;
    // coherent, |Ψ⟩_N and qutrit states are completely polarized
    let complete = match &config.state {
        StateSpec::Coherent { .. } | StateSpec::Qutrit { .. } => Some(1.0),
        StateSpec::PsiN { n, .. } if *n > 0 => Some(1.0),
        _ => None,
    };
    let mut rows = vec![
        Row::new("P3", "polarimetry::degree_p3")
            .mean(r.degree)
            .reference(complete, Compared::Mean),
        Row::new(
            "P3_from_invariants",
            "polarimetry::degree_p3_from_invariants",
        )
        .mean(r.degree_from_invariants)
        .reference(Some(r.degree), Compared::Mean),
        Row::new("trace_J", "polarimetry::coherency3").mean(r.trace),
        Row::new("trace_J2", "polarimetry::coherency3").mean(r.tr_sq),
        Row::new("trace_J3", "polarimetry::coherency3").mean(r.tr_cube),
        Row::new("det_J", "polarimetry::coherency3")
            .mean(r.det)
            .reference(complete.map(|_| 0.0), Compared::Mean),
        Row::new("cube_identity_residual", "polarimetry::degree_p3").mean(r.cube_identity_residual),
        Row::new("square_identity_residual", "polarimetry::degree_p3")
            .mean(r.square_identity_residual),
        Row::new("det_residual", "polarimetry::complete_polarization_test").mean(r.det_residual),
        Row::new("complete", "polarimetry::complete_polarization_test").mean(if r.complete {
            1.0
        } else {
            0.0
        }),
    ];
    let mut notes = Vec::new();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let name = format!("P2_{}{}", a + 1, b + 1);
        match degree_p2(&coherency2(state, (a, b))?) {
            Ok(p) => rows.push(Row::new(name, "polarimetry::degree_p2").mean(p)),
            Err(Error::UndefinedDegree) => notes.push(format!("{name} undefined: no photons")),
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome {
        rows,
        notes,
        ..Outcome::default()
    })
}

fn amplitude(state: &QuantumState, config: &ExperimentConfig) -> Result<Outcome> {
    let full = counting_distribution(state)?;
    let mut notes = Vec::new();
    let mut rows = Vec::new();
    let dist = if config.weak_field {
        let (d, w0) = full.without_vacuum()?;
        rows.push(Row::new("vacuum_mass", "amplitude::weak_field_statistics").mean(w0));
        d
    } else {
        full
    };
    if let Some(c) = dist.correlation_warning() {
        notes.push(format!(
            "count cross-covariance {c:.3e} exceeds 1e-6 N: linearized formulas assume uncorrelated modes"
        ));
    }
    let (nbar, sigma2) = dist.count_moments();

    let references: Option<[f64; 4]> = match &config.state {
        StateSpec::Qutrit { angles } => {
            let p = 0.25 * (2.0 * angles.phi).sin().powi(2);
            let t = 0.25 * (2.0 * angles.theta).sin().powi(2);
            Some([p, p, t, t])
        }
        StateSpec::Fock { .. } => Some([0.0; 4]),
        _ => None,
    };
    let linearized = match &config.state {
        StateSpec::Coherent { .. } => linearized_variances(nbar, sigma2).ok(),
        _ => None,
    };

    for (k, obs) in AmplitudeObservable::ALL.into_iter().enumerate() {
        match observable_statistics(&dist, obs) {
            Ok(s) => {
                rows.push(
                    Row::new(obs.name(), "amplitude::amplitude_statistics")
                        .mean(s.mean)
                        .variance(s.variance)
                        .reference(references.map(|r| r[k]), Compared::Variance),
                );
                rows.push(
                    Row::new(
                        format!("{}.excluded_mass", obs.name()),
                        "amplitude::amplitude_statistics",
                    )
                    .mean(s.excluded_mass),
                );
            }
            Err(Error::UndefinedStatistics(msg)) => notes.push(msg),
            Err(e) => return Err(e),
        }
    }
    if let Some(lin) = linearized {
        for (obs, v) in AmplitudeObservable::ALL.iter().zip(lin) {
            let exact = rows
                .iter()
                .find(|r| r.observable == obs.name())
                .and_then(|r| r.variance);
            let mut row = Row::new(
                format!("{}.linearized", obs.name()),
                "amplitude::linearized_variances",
            )
            .variance(v);
            if let Some(e) = exact {
                row = row.reference(Some(e), Compared::Variance);
            }
            rows.push(row);
        }
    }
    for j in 0..3 {
        rows.push(
            Row::new(
                format!("count{}", j + 1),
                "amplitude::counting_distribution",
            )
            .mean(nbar[j])
            .variance(sigma2[j]),
        );
    }
    Ok(Outcome {
        rows,
        notes,
        ..Outcome::default()
    })
}

fn interferometer(config: &ExperimentConfig) -> Result<Outcome> {
    match config.scheme {
        Scheme::TwelvePort => twelve_port(config),
        Scheme::Parallel => parallel(config),
        Scheme::Homodyne => homodyne(config),
    }
}

/// The network input: analytic coherent moments unless the Fock backend is
/// requested explicitly.
fn network_input(config: &ExperimentConfig) -> Result<(NetworkInput, f64)> {
    match (&config.state, config.backend) {
        (StateSpec::Coherent { alphas }, Backend::Auto | Backend::Moments) => Ok((
            NetworkInput::Coherent(alphas.iter().map(|a| a.0).collect()),
            0.0,
        )),
        _ => {
            let st = build_state(&config.state, &config.space)?;
            let tail = st.tail_mass();
            Ok((NetworkInput::State(st), tail))
        }
    }
}

fn twelve_port(config: &ExperimentConfig) -> Result<Outcome> {
    let (input, tail_mass) = network_input(config)?;
    let net = build_twelve_port(config.phases);
    let stats = detection_stats(&net, &input, config.backend)?;

    let j: Option<[[C64; 3]; 3]> = match &input {
        NetworkInput::State(st) => {
            let m = coherency3(st)?;
            let e = m.entries();
            Some(std::array::from_fn(|a| std::array::from_fn(|b| e[(a, b)])))
        }
        _ => closed_form_coherency(&config.state)?,
    };
    let [phi1, phi2, phi3] = config.phases;
    let targets = [
        ("N12", 0, 1, phi2),
        ("N13", 0, 2, -phi1),
        ("N23", 1, 2, phi3),
    ];
    let setting = format!("phases={phi1},{phi2},{phi3}");
    let mut rows = Vec::new();
    for (name, a, b, chi) in targets {
        let d = stats.difference(name).expect("twelve-port difference");
        // ½⟨λᵢⱼ⟩ = Re(e^{iχ}⟨aᵢ⁺aⱼ⟩)
        let half = j.map(|j| (C64::from_polar(1.0, chi) * j[a][b]).re);
        let mut row = Row::new(name, "network::detection_stats")
            .mean(d.mean)
            .variance(d.variance)
            .reference(half, Compared::Mean);
        row.setting = setting.clone();
        rows.push(row);
    }
    for (name, mean) in stats.port_names.iter().zip(&stats.port_means) {
        let k = stats
            .port_names
            .iter()
            .position(|n| n == name)
            .expect("port");
        let mut row = Row::new(format!("port.{name}"), "network::detection_stats")
            .mean(*mean)
            .variance(stats.port_covariance[k][k]);
        row.setting = setting.clone();
        rows.push(row);
    }
    Ok(Outcome {
        rows,
        tail_mass,
        notes: vec![format!("backend: {:?}", stats.backend).to_lowercase()],
    })
}

fn parallel(config: &ExperimentConfig) -> Result<Outcome> {
    let (input, tail_mass) = match &config.state {
        StateSpec::Coherent { alphas } => (
            NetworkInput::Coherent(alphas.iter().map(|a| a.0).collect()),
            0.0,
        ),
        _ => {
            let st = build_state(&config.state, &config.space)?;
            let tail = st.tail_mass();
            (NetworkInput::State(st), tail)
        }
    };
    let j = match &input {
        NetworkInput::State(st) => {
            let m = coherency3(st)?;
            let e = m.entries();
            Some(std::array::from_fn(|a| std::array::from_fn(|b| e[(a, b)])))
        }
        _ => closed_form_coherency(&config.state)?,
    };
    let mut rows = Vec::new();
    for e in parallel_estimates(&input)? {
        let reference = j.as_ref().map(|j| contract(e.lambda, j));
        let mut raw = Row::new(
            format!("{}.raw", e.difference),
            "network::parallel_estimates",
        )
        .mean(e.raw_mean)
        .variance(e.raw_variance);
        raw.setting = format!("lambda{}", e.lambda);
        let mut referred = Row::new(
            format!("{}.input_referred", e.difference),
            "network::parallel_estimates",
        )
        .mean(e.input_referred)
        .reference(reference.map(|r| r / 2.0), Compared::Mean);
        referred.setting = raw.setting.clone();
        let mut lambda = Row::new(format!("lambda{}", e.lambda), "network::parallel_estimates")
            .mean(e.lambda_estimate)
            .reference(reference, Compared::Mean);
        lambda.setting = raw.setting.clone();
        rows.extend([raw, referred, lambda]);
    }
    Ok(Outcome {
        rows,
        tail_mass,
        notes: vec!["backend: moments".into()],
    })
}

fn homodyne(config: &ExperimentConfig) -> Result<Outcome> {
    let StateSpec::Coherent { alphas } = &config.state else {
        return Err(Error::Domain(
            "homodyne scheme needs a coherent state (beta1, beta2, control)".into(),
        ));
    };
    if alphas.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: alphas.len(),
        });
    }
    let signal_spec = StateSpec::Coherent {
        alphas: alphas[..2].to_vec(),
    };
    let signal = build_state(&signal_spec, &config.space)?;
    let control = alphas[2].0;
    let h = homodyne_limit(&signal, control)?;
    let direct = quadratures(&signal, h.control_phase)?;
    let measured = [h.q1, h.p1, h.q2, h.p2];
    let setting = format!("control={}", crate::config::Complex(control));
    let mut rows = Vec::new();
    for ((name, m), d) in ["q1", "p1", "q2", "p2"].iter().zip(measured).zip(direct) {
        let mut row = Row::new(*name, "network::homodyne_limit")
            .mean(m)
            .reference(Some(d), Compared::Mean);
        row.setting = setting.clone();
        rows.push(row);
    }
    let mut p3 = Row::new("P3", "network::homodyne_limit").mean(h.degree_p3);
    p3.setting = setting;
    rows.push(p3);
    Ok(Outcome {
        rows,
        tail_mass: signal.tail_mass(),
        notes: Vec::new(),
    })
}
