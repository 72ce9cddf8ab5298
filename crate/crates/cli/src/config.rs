//! Experiment configuration and its JSON form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use su3pol::network::{Backend, TwelvePortPhases, PHASES_REAL};
use su3pol::C64;

/// A complex number written as `re+imi`: `1`, `-0.5`, `2i`, `-i`,
/// `0.3-0.2i`, `1e-3+4e2i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complex(pub C64);

impl FromStr for Complex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = || format!("not a complex literal: {s:?} (expected re+imi)");
        let parse = |t: &str| -> Result<f64, String> {
            match t {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => t.parse::<f64>().map_err(|_| bad()),
            }
        };
        if s.is_empty() {
            return Err(bad());
        }
        let value = match s.strip_suffix('i') {
            None => C64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0),
            Some(body) => {
                // split at the last sign that is not part of an exponent
                let bytes = body.as_bytes();
                let split = (1..bytes.len()).rev().find(|&k| {
                    matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E')
                });
                match split {
                    Some(k) => C64::new(
                        body[..k].parse::<f64>().map_err(|_| bad())?,
                        parse(&body[k..])?,
                    ),
                    None => C64::new(0.0, parse(body)?),
                }
            }
        };
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(bad());
        }
        Ok(Self(value))
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let C64 { re, im } = self.0;
        if im.is_sign_negative() {
            write!(f, "{re}-{}i", -im)
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Angles `(θ, φ, ψ₁, ψ₂)` in radians.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Angles {
    pub theta: f64,
    pub phi: f64,
    pub psi1: f64,
    pub psi2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Coherent {
        alphas: Vec<Complex>,
    },
    PsiN {
        #[serde(flatten)]
        angles: Angles,
        n: usize,
    },
    Qutrit {
        #[serde(flatten)]
        angles: Angles,
    },
    Fock {
        occupation: Vec<u16>,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
}

impl StateSpec {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Coherent { .. } => "coherent",
            Self::PsiN { .. } => "psi_n",
            Self::Qutrit { .. } => "qutrit",
            Self::Fock { .. } => "fock",
            Self::Mixture { .. } => "mixture",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub state: StateSpec,
}

/// Truncation of the Fock space; `None` picks a value from the state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpaceSpec {
    pub cutoff: Option<usize>,
    pub cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    #[default]
    State,
    Gellmann,
    Polarization,
    Interferometer,
    Amplitude,
}

/// What the interferometer analysis measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// One twelve-port interferometer at the configured phases.
    #[default]
    TwelvePort,
    /// Splitter stage plus two interferometers measuring all six
    /// off-diagonal Gell-Mann operators at once.
    Parallel,
    /// Mode 3 of a coherent input acts as local oscillator for modes 1, 2.
    Homodyne,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Theta,
    Phi,
    Psi1,
    Psi2,
    /// Common factor on all coherent amplitudes.
    AlphaScale,
    Phi1,
    Phi2,
    Phi3,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::Theta => "theta",
            Self::Phi => "phi",
            Self::Psi1 => "psi1",
            Self::Psi2 => "psi2",
            Self::AlphaScale => "alpha_scale",
            Self::Phi1 => "phi1",
            Self::Phi2 => "phi2",
            Self::Phi3 => "phi3",
        }
    }
}

/// `steps` evenly spaced points from `start` to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|k| self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub state: StateSpec,
    #[serde(default)]
    pub space: SpaceSpec,
    #[serde(default)]
    pub analysis: Analysis,
    /// `(φ₁, φ₂, φ₃)` of the twelve-port interferometer.
    #[serde(default = "default_phases")]
    pub phases: TwelvePortPhases,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_backend")]
    pub backend: Backend,
    /// Discard the no-click outcome in the amplitude analysis.
    #[serde(default)]
    pub weak_field: bool,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn default_phases() -> TwelvePortPhases {
    PHASES_REAL
}

fn default_backend() -> Backend {
    Backend::Auto
}

impl ExperimentConfig {
    pub fn new(state: StateSpec) -> Self {
        Self {
            state,
            space: SpaceSpec::default(),
            analysis: Analysis::default(),
            phases: default_phases(),
            scheme: Scheme::default(),
            backend: default_backend(),
            weak_field: false,
            format: Format::default(),
            sweep: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The config with one sweep parameter set to `value`.
    pub fn at(&self, parameter: SweepParameter, value: f64) -> Result<Self, String> {
        let mut c = self.clone();
        c.sweep = None;
        let angles = match &mut c.state {
            StateSpec::PsiN { angles, .. } | StateSpec::Qutrit { angles } => Some(angles),
            _ => None,
        };
        match parameter {
            SweepParameter::Phi1 => c.phases[0] = value,
            SweepParameter::Phi2 => c.phases[1] = value,
            SweepParameter::Phi3 => c.phases[2] = value,
            SweepParameter::AlphaScale => match &mut c.state {
                StateSpec::Coherent { alphas } => {
                    alphas.iter_mut().for_each(|a| a.0 *= value);
                }
                other => {
                    return Err(format!(
                        "alpha_scale needs a coherent state, not {}",
                        other.label()
                    ))
                }
            },
            p => {
                let a = angles
                    .ok_or_else(|| format!("{} sweep needs a psi_n or qutrit state", p.name()))?;
                match p {
                    SweepParameter::Theta => a.theta = value,
                    SweepParameter::Phi => a.phi = value,
                    SweepParameter::Psi1 => a.psi1 = value,
                    SweepParameter::Psi2 => a.psi2 = value,
                    _ => unreachable!(),
                }
            }
        }
        Ok(c)
    }
}
