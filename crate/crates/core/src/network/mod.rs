//! Linear-optical mode networks built from balanced beam splitters and phase
//! shifters, with ideal photon-counting detectors on every output.
//!
//! A network maps input annihilation operators `c` to output operators
//! `d = U c`. Inputs `0..n_signal` carry the signal state; the remaining
//! inputs are vacuum ancillas.
//!
//! # Twelve-port calibration
//!
//! [`build_twelve_port`] splits each signal mode `aⱼ` against a vacuum port
//! `Vⱼ` into halves `uⱼ = (aⱼ + iVⱼ)/√2` and `wⱼ = (iaⱼ + Vⱼ)/√2`, then
//! recombines the pairs `(u₁, u₂)`, `(w₁, u₃)`, `(w₂, w₃)`. For a balanced
//! splitter with inputs `x`, `y` the output difference is
//! `i(x⁺y − y⁺x)`. If `x ∋ sᵢaᵢ/√2` and `y ∋ e^{iχ}sⱼaⱼ/√2` the signal part
//! of the difference is `(i/2) sᵢ* sⱼ e^{iχ} aᵢ⁺aⱼ + h.c.`; demanding
//! `½ t aᵢ⁺aⱼ + h.c.` with the target phase `t` gives
//! `e^{iχ} = −i t sᵢ sⱼ*`. With `s = 1` for `u` and `s = i` for `w`:
//!
//! | pair   | target `t`  | shifter `χ`  |
//! |--------|-------------|--------------|
//! | (1, 2) | `e^{iφ₂}`   | `φ₂ − π/2`   |
//! | (1, 3) | `e^{−iφ₁}`  | `−φ₁`        |
//! | (2, 3) | `e^{iφ₃}`   | `φ₃ − π/2`   |
//!
//! Everything left over in the difference operators contains at least one
//! vacuum operator and is normally ordered, so it has zero mean; its second
//! moment is `¼(⟨nᵢ⟩ + ⟨nⱼ⟩)`.

mod detection;
mod evolution;
mod homodyne;
mod moments;

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use detection::{
    backend_discrepancy, detection_stats, Backend, DetectionStats, DifferenceStat, NetworkInput,
};
pub use evolution::{evolve, splitter_stage, FOCK_BACKEND_MAX_DIM};
pub use homodyne::{homodyne_limit, quadratures, HomodyneEstimates};
pub use moments::SignalMoments;

/// Unitarity slack for a built network.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// One optical element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    /// Balanced beam splitter: `c_a → (c_a + i c_b)/√2`,
    /// `c_b → (i c_a + c_b)/√2`.
    Bs(usize, usize),
    /// Phase shift `c_j → e^{iθ} c_j`.
    Phase(usize, f64),
}

/// Sign and phase convention of a balanced beam splitter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BsConvention {
    /// Transmission `1/√2`, reflection `i/√2`.
    Symmetric,
    /// `[[1, 1], [1, −1]]/√2`.
    Hadamard,
}

/// The 2×2 block of a balanced beam splitter.
pub fn balanced_bs(convention: BsConvention) -> [[C64; 2]; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match convention {
        BsConvention::Symmetric => [
            [C64::new(r, 0.0), C64::new(0.0, r)],
            [C64::new(0.0, r), C64::new(r, 0.0)],
        ],
        BsConvention::Hadamard => [
            [C64::new(r, 0.0), C64::new(r, 0.0)],
            [C64::new(r, 0.0), C64::new(-r, 0.0)],
        ],
    }
}

/// A photon-number difference `N(plus) − N(minus)` between two ports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Difference {
    pub name: String,
    pub plus: String,
    pub minus: String,
}

/// Serializable wiring of a network; the unitary is rebuilt from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkRecord {
    pub n_modes: usize,
    pub signal_modes: usize,
    pub elements: Vec<Element>,
    pub ports: Vec<(String, usize)>,
    pub differences: Vec<Difference>,
}

#[derive(Clone, Debug)]
pub struct ModeNetwork {
    record: NetworkRecord,
    unitary: DMatrix<C64>,
}

impl ModeNetwork {
    pub fn from_record(record: NetworkRecord) -> Result<Self> {
        let n = record.n_modes;
        if record.signal_modes > n || n == 0 {
            return Err(Error::Domain(format!(
                "{} signal modes in a {n}-mode network",
                record.signal_modes
            )));
        }
        let mut u = DMatrix::<C64>::identity(n, n);
        for el in &record.elements {
            let mut step = DMatrix::<C64>::identity(n, n);
            match *el {
                Element::Bs(a, b) => {
                    if a == b || a >= n || b >= n {
                        return Err(Error::Domain(format!("bad beam splitter modes ({a}, {b})")));
                    }
                    let blk = balanced_bs(BsConvention::Symmetric);
                    step[(a, a)] = blk[0][0];
                    step[(a, b)] = blk[0][1];
                    step[(b, a)] = blk[1][0];
                    step[(b, b)] = blk[1][1];
                }
                Element::Phase(j, theta) => {
                    if j >= n {
                        return Err(Error::Domain(format!("phase on missing mode {j}")));
                    }
                    step[(j, j)] = C64::from_polar(1.0, theta);
                }
            }
            u = step * u;
        }
        for (name, port) in &record.ports {
            if *port >= n {
                return Err(Error::Domain(format!("port {name} on missing mode {port}")));
            }
        }
        let net = Self { record, unitary: u };
        for d in &net.record.differences {
            net.port(&d.plus)?;
            net.port(&d.minus)?;
        }
        Ok(net)
    }

    pub fn record(&self) -> &NetworkRecord {
        &self.record
    }

    pub fn n_total_modes(&self) -> usize {
        self.record.n_modes
    }

    pub fn n_signal(&self) -> usize {
        self.record.signal_modes
    }

    pub fn unitary(&self) -> &DMatrix<C64> {
        &self.unitary
    }

    pub fn vacuum_ports(&self) -> BTreeSet<usize> {
        (self.record.signal_modes..self.record.n_modes).collect()
    }

    pub fn ports(&self) -> &[(String, usize)] {
        &self.record.ports
    }

    pub fn differences(&self) -> &[Difference] {
        &self.record.differences
    }

    pub fn port(&self, name: &str) -> Result<usize> {
        self.record
            .ports
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| *m)
            .ok_or_else(|| Error::Domain(format!("no port named {name}")))
    }

    /// `max |U⁺U − 1|`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.record.n_modes;
        (self.unitary.adjoint() * &self.unitary - DMatrix::<C64>::identity(n, n))
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Phase settings `(φ₁, φ₂, φ₃)` of the twelve-port interferometer.
pub type TwelvePortPhases = [f64; 3];

/// `φ = (0, 0, 0)`: the differences measure `λ₁, λ₄, λ₆`.
pub const PHASES_REAL: TwelvePortPhases = [0.0, 0.0, 0.0];

/// `φ = (π/2, −π/2, −π/2)`: the differences measure `λ₂, λ₅, λ₇`.
pub const PHASES_IMAGINARY: TwelvePortPhases = [FRAC_PI_2, -FRAC_PI_2, -FRAC_PI_2];

/// Appends a twelve-port interferometer acting on `signal` (three modes)
/// with `vacuum` (three ancillas). Port and difference names get `prefix`.
fn push_twelve_port(
    record: &mut NetworkRecord,
    signal: [usize; 3],
    vacuum: [usize; 3],
    phases: TwelvePortPhases,
    prefix: &str,
) {
    let [phi1, phi2, phi3] = phases;
    let [m1, m2, m3] = signal;
    let [v1, v2, v3] = vacuum;
    let els = &mut record.elements;
    // split: signal slot keeps u, vacuum slot gets w
    els.extend([
        Element::Bs(m1, v1),
        Element::Bs(m2, v2),
        Element::Bs(m3, v3),
    ]);
    // (u₁, u₂)
    els.push(Element::Phase(m2, phi2 - FRAC_PI_2));
    els.push(Element::Bs(m1, m2));
    // (w₁, u₃)
    els.push(Element::Phase(m3, -phi1));
    els.push(Element::Bs(v1, m3));
    // (w₂, w₃)
    els.push(Element::Phase(v3, phi3 - FRAC_PI_2));
    els.push(Element::Bs(v2, v3));

    let label = |s: &str| format!("{prefix}{s}");
    record.ports.extend([
        (label("d12"), m1),
        (label("d21"), m2),
        (label("d13"), v1),
        (label("d31"), m3),
        (label("d32"), v2),
        (label("d23"), v3),
    ]);
    for (name, plus, minus) in [
        ("N12", "d12", "d21"),
        ("N13", "d13", "d31"),
        ("N23", "d32", "d23"),
    ] {
        record.differences.push(Difference {
            name: label(name),
            plus: label(plus),
            minus: label(minus),
        });
    }
}

/// Six-mode twelve-port interferometer: inputs `(a₁, a₂, a₃, V₁, V₂, V₃)`,
/// detectors `d₁₂, d₂₁, d₁₃, d₃₁, d₂₃, d₃₂`, and differences
/// `N⁻₁₂ = N₁₂ − N₂₁`, `N⁻₁₃ = N₁₃ − N₃₁`, `N⁻₂₃ = N₃₂ − N₂₃` satisfying
/// `N⁻ᵢⱼ = ½λᵢⱼ + Mᵢⱼ` with
///
/// * `λ₁₂ = a₁⁺a₂ e^{iφ₂} + h.c.`
/// * `λ₁₃ = a₁⁺a₃ e^{−iφ₁} + h.c.`
/// * `λ₂₃ = a₂⁺a₃ e^{iφ₃} + h.c.`
pub fn build_twelve_port(phases: TwelvePortPhases) -> ModeNetwork {
    let mut record = NetworkRecord {
        n_modes: 6,
        signal_modes: 3,
        elements: Vec::new(),
        ports: Vec::new(),
        differences: Vec::new(),
    };
    push_twelve_port(&mut record, [0, 1, 2], [3, 4, 5], phases, "");
    ModeNetwork::from_record(record).expect("twelve-port wiring is valid")
}

/// The three balanced splitters that copy `b₁, b₂, b₃` into
/// `(a₁, a₂, a₃, a₁′, a₂′, a₃′)` using vacuum inputs `V₁₀, V₂₀, V₃₀`.
pub fn build_splitter() -> ModeNetwork {
    let mut record = NetworkRecord {
        n_modes: 6,
        signal_modes: 3,
        elements: (0..3).map(|j| Element::Bs(j, j + 3)).collect(),
        ports: Vec::new(),
        differences: Vec::new(),
    };
    for j in 0..3 {
        record.ports.push((format!("a{}", j + 1), j));
        record.ports.push((format!("a{}'", j + 1), j + 3));
    }
    ModeNetwork::from_record(record).expect("splitter wiring is valid")
}

/// Splitter stage followed by two twelve-port interferometers: `I1` on the
/// copies `a` and `I2` on the copies `a′`. Twelve modes: signal `b` (0..3),
/// splitter vacua (3..6), `I1` vacua (6..9), `I2` vacua (9..12). Ports and
/// differences are prefixed `I1.` / `I2.`.
pub fn build_parallel_measurement(i1: TwelvePortPhases, i2: TwelvePortPhases) -> ModeNetwork {
    let mut record = NetworkRecord {
        n_modes: 12,
        signal_modes: 3,
        elements: (0..3).map(|j| Element::Bs(j, j + 3)).collect(),
        ports: Vec::new(),
        differences: Vec::new(),
    };
    push_twelve_port(&mut record, [0, 1, 2], [6, 7, 8], i1, "I1.");
    push_twelve_port(&mut record, [3, 4, 5], [9, 10, 11], i2, "I2.");
    ModeNetwork::from_record(record).expect("parallel wiring is valid")
}

/// One Gell-Mann estimate from the parallel (splitter + two
/// interferometer) measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelEstimate {
    /// Index `j` of the estimated `λⱼ`.
    pub lambda: usize,
    pub difference: String,
    /// `⟨N⁻⟩` as counted.
    pub raw_mean: f64,
    pub raw_variance: f64,
    /// `2⟨N⁻⟩`: undoes the splitter's halving, so this is the `½⟨λⱼ⟩` a
    /// stand-alone twelve-port would read on the input field.
    pub input_referred: f64,
    /// `4⟨N⁻⟩ = ⟨λⱼ⟩` of the input field.
    pub lambda_estimate: f64,
}

/// Simultaneous estimates of `λ₁, λ₄, λ₆` (interferometer `I1`, all phases
/// zero) and `λ₂, λ₅, λ₇` (`I2`, phases `(π/2, −π/2, −π/2)`) behind the
/// splitter stage.
pub fn parallel_estimates(input: &NetworkInput) -> Result<Vec<ParallelEstimate>> {
    let net = build_parallel_measurement(PHASES_REAL, PHASES_IMAGINARY);
    let stats = detection_stats(&net, input, Backend::Moments)?;
    let plan = [
        (1, "I1.N12"),
        (4, "I1.N13"),
        (6, "I1.N23"),
        (2, "I2.N12"),
        (5, "I2.N13"),
        (7, "I2.N23"),
    ];
    Ok(plan
        .iter()
        .map(|&(lambda, name)| {
            let d = stats.difference(name).expect("parallel network difference");
            ParallelEstimate {
                lambda,
                difference: name.to_string(),
                raw_mean: d.mean,
                raw_variance: d.variance,
                input_referred: 2.0 * d.mean,
                lambda_estimate: 4.0 * d.mean,
            }
        })
        .collect())
}
