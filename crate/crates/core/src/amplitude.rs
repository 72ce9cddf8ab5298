//! Relative-amplitude observables built from photon-number ratios,
//!
//! `S_φ = √(n₂/(n₁+n₂))`, `C_φ = √(n₁/(n₁+n₂))`,
//! `S_θ = √((n₁+n₂)/N)`, `C_θ = √(n₃/N)`, with `N = n₁+n₂+n₃`,
//!
//! and their statistics under ideal photon counting. All four commute with
//! the number operators, so everything is evaluated pointwise on the joint
//! counting distribution.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::QuantumState;

/// Slack on the total probability of a counting distribution.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-10;

/// Cross-covariances above this fraction of `N` void the product-state
/// assumption behind [`linearized_variances`].
pub const CORRELATION_WARNING: f64 = 1e-6;

/// Joint probabilities `W(n₁, n₂, n₃)` of three photon counters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingDistribution {
    pub support: Vec<[u16; 3]>,
    pub probabilities: Vec<f64>,
}

impl CountingDistribution {
    pub fn new(support: Vec<[u16; 3]>, probabilities: Vec<f64>) -> Result<Self> {
        if support.len() != probabilities.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                found: probabilities.len(),
            });
        }
        if let Some(p) = probabilities.iter().find(|p| p.is_nan() || **p < 0.0) {
            return Err(Error::Domain(format!("negative probability {p}")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            support,
            probabilities,
        })
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u16; 3], f64)> + '_ {
        self.support.iter().zip(self.probabilities.iter().copied())
    }

    pub fn probability(&self, n: [u16; 3]) -> f64 {
        self.iter()
            .filter(|(m, _)| **m == n)
            .fold(0.0, |acc, (_, p)| acc + p)
    }

    /// Mean counts `n̄ⱼ` and count variances `σⱼ²`.
    pub fn count_moments(&self) -> ([f64; 3], [f64; 3]) {
        let mut mean = [0.0; 3];
        for (n, p) in self.iter() {
            for j in 0..3 {
                mean[j] += p * n[j] as f64;
            }
        }
        let mut var = [0.0; 3];
        for (n, p) in self.iter() {
            for j in 0..3 {
                var[j] += p * (n[j] as f64 - mean[j]).powi(2);
            }
        }
        (mean, var)
    }

    /// `Cov(n₁,n₂), Cov(n₁,n₃), Cov(n₂,n₃)`.
    pub fn cross_covariances(&self) -> [f64; 3] {
        let (mean, _) = self.count_moments();
        let mut cov = [0.0; 3];
        for (n, p) in self.iter() {
            let d: [f64; 3] = std::array::from_fn(|j| n[j] as f64 - mean[j]);
            cov[0] += p * d[0] * d[1];
            cov[1] += p * d[0] * d[2];
            cov[2] += p * d[1] * d[2];
        }
        cov
    }

    /// The largest `|Cov(nᵢ,nⱼ)|` if it exceeds `CORRELATION_WARNING · N`.
    pub fn correlation_warning(&self) -> Option<f64> {
        let (mean, _) = self.count_moments();
        let total: f64 = mean.iter().sum();
        let worst = self
            .cross_covariances()
            .iter()
            .map(|c| c.abs())
            .fold(0.0, f64::max);
        (worst > CORRELATION_WARNING * total).then_some(worst)
    }

    /// Drops the all-zero outcome and renormalizes by `1 − W(0,0,0)`.
    pub fn without_vacuum(&self) -> Result<(Self, f64)> {
        let w0 = self.probability([0, 0, 0]);
        let keep = 1.0 - w0;
        if keep <= 0.0 {
            return Err(Error::UndefinedStatistics(
                "no probability outside the vacuum".into(),
            ));
        }
        let (support, probabilities) = self
            .iter()
            .filter(|(n, _)| **n != [0, 0, 0])
            .map(|(n, p)| (*n, p / keep))
            .unzip();
        Ok((
            Self {
                support,
                probabilities,
            },
            w0,
        ))
    }

    /// Checks `S_φ² + C_φ² = 1` and `S_θ² + C_θ² = 1` in exact rational
    /// arithmetic on every tuple where they are defined.
    pub fn pointwise_identity_holds(&self) -> bool {
        let one = Ratio::from_integer(1u64);
        self.support.iter().all(|n| {
            let [n1, n2, n3] = n.map(u64::from);
            let phi_ok = n1 + n2 == 0 || Ratio::new(n2, n1 + n2) + Ratio::new(n1, n1 + n2) == one;
            let total = n1 + n2 + n3;
            let theta_ok = total == 0 || Ratio::new(n1 + n2, total) + Ratio::new(n3, total) == one;
            phi_ok && theta_ok
        })
    }
}

/// Ideal-detector counting distribution of a three-mode state: the Fock
/// occupation probabilities. Zero-probability tuples are left out.
pub fn counting_distribution(state: &QuantumState) -> Result<CountingDistribution> {
    let space = state.space();
    if space.n_modes() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: space.n_modes(),
        });
    }
    let (support, probabilities): (Vec<[u16; 3]>, Vec<f64>) = state
        .probabilities()
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .map(|(i, p)| {
            let o = space.occupation(i);
            ([o[0], o[1], o[2]], p)
        })
        .unzip();
    // renormalize away round-off from the state; the truncation tail is
    // already accounted for by the state itself
    let total: f64 = probabilities.iter().sum();
    CountingDistribution::new(support, probabilities.iter().map(|p| p / total).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditioningPolicy {
    /// Tuples where an observable's denominator vanishes are dropped for
    /// that observable and the rest renormalized.
    ExcludeUndefined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conditioning {
    pub policy: ConditioningPolicy,
    pub vacuum_discarded: bool,
    /// `W(0,0,0)` removed before the statistics (zero if not discarded).
    pub vacuum_mass: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableStats {
    pub mean: f64,
    pub variance: f64,
    pub second_moment: f64,
    pub conditioned_mass: f64,
    pub excluded_mass: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeObservable {
    SinPhi,
    CosPhi,
    SinTheta,
    CosTheta,
}

impl AmplitudeObservable {
    pub const ALL: [Self; 4] = [Self::SinPhi, Self::CosPhi, Self::SinTheta, Self::CosTheta];

    pub fn name(self) -> &'static str {
        match self {
            Self::SinPhi => "S_phi",
            Self::CosPhi => "C_phi",
            Self::SinTheta => "S_theta",
            Self::CosTheta => "C_theta",
        }
    }

    /// Value on one occupation tuple; `None` where the denominator is zero.
    pub fn value(self, n: [u16; 3]) -> Option<f64> {
        let [n1, n2, n3] = n.map(f64::from);
        let (num, den) = match self {
            Self::SinPhi => (n2, n1 + n2),
            Self::CosPhi => (n1, n1 + n2),
            Self::SinTheta => (n1 + n2, n1 + n2 + n3),
            Self::CosTheta => (n3, n1 + n2 + n3),
        };
        (den > 0.0).then(|| (num / den).sqrt())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeStats {
    pub s_phi: ObservableStats,
    pub c_phi: ObservableStats,
    pub s_theta: ObservableStats,
    pub c_theta: ObservableStats,
    pub conditioning: Conditioning,
    /// Largest mass excluded for any observable.
    pub excluded_mass: f64,
}

impl AmplitudeStats {
    pub fn get(&self, obs: AmplitudeObservable) -> &ObservableStats {
        match obs {
            AmplitudeObservable::SinPhi => &self.s_phi,
            AmplitudeObservable::CosPhi => &self.c_phi,
            AmplitudeObservable::SinTheta => &self.s_theta,
            AmplitudeObservable::CosTheta => &self.c_theta,
        }
    }

    pub fn variances(&self) -> [f64; 4] {
        AmplitudeObservable::ALL.map(|o| self.get(o).variance)
    }
}

/// Conditioned statistics of one observable, excluding the tuples where it
/// is undefined.
pub fn observable_statistics(
    dist: &CountingDistribution,
    obs: AmplitudeObservable,
) -> Result<ObservableStats> {
    let mut mass = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for (n, p) in dist.iter() {
        if let Some(v) = obs.value(*n) {
            mass += p;
            first += p * v;
            second += p * v * v;
        }
    }
    if mass <= 0.0 {
        return Err(Error::UndefinedStatistics(format!(
            "{} is undefined on the whole support",
            obs.name()
        )));
    }
    let mean = first / mass;
    let variance = dist
        .iter()
        .filter_map(|(n, p)| obs.value(*n).map(|v| p * (v - mean).powi(2)))
        .sum::<f64>()
        / mass;
    let total: f64 = dist.probabilities.iter().sum();
    Ok(ObservableStats {
        mean,
        variance,
        second_moment: second / mass,
        conditioned_mass: mass / total,
        excluded_mass: (total - mass) / total,
    })
}

/// Means and variances of the four amplitude observables.
pub fn amplitude_statistics(
    dist: &CountingDistribution,
    policy: ConditioningPolicy,
) -> Result<AmplitudeStats> {
    let conditioning = Conditioning {
        policy,
        vacuum_discarded: false,
        vacuum_mass: 0.0,
    };
    stats_with(dist, conditioning)
}

fn stats_with(dist: &CountingDistribution, conditioning: Conditioning) -> Result<AmplitudeStats> {
    let [s_phi, c_phi, s_theta, c_theta] =
        AmplitudeObservable::ALL.map(|o| observable_statistics(dist, o));
    let (s_phi, c_phi, s_theta, c_theta) = (s_phi?, c_phi?, s_theta?, c_theta?);
    let excluded_mass = [s_phi, c_phi, s_theta, c_theta]
        .iter()
        .map(|s| s.excluded_mass)
        .fold(0.0, f64::max);
    Ok(AmplitudeStats {
        s_phi,
        c_phi,
        s_theta,
        c_theta,
        conditioning,
        excluded_mass,
    })
}

/// Statistics with the no-click outcome discarded, as in a weak-field
/// experiment that only registers events with at least one count.
pub fn weak_field_statistics(state: &QuantumState) -> Result<AmplitudeStats> {
    let (dist, vacuum_mass) = counting_distribution(state)?.without_vacuum()?;
    stats_with(
        &dist,
        Conditioning {
            policy: ConditioningPolicy::ExcludeUndefined,
            vacuum_discarded: true,
            vacuum_mass,
        },
    )
}

/// Small-fluctuation variances of `S_φ, C_φ, S_θ, C_θ` from mean counts
/// `n̄` and count variances `σ²`, assuming uncorrelated modes.
pub fn linearized_variances(mean: [f64; 3], var: [f64; 3]) -> Result<[f64; 4]> {
    if mean.iter().any(|m| m.is_nan() || *m <= 0.0) {
        return Err(Error::Domain(format!(
            "linearization needs every mean count positive, got {mean:?}; use exact statistics"
        )));
    }
    let [n1, n2, n3] = mean;
    let [v1, v2, v3] = var;
    let n12 = n1 + n2;
    let total = n12 + n3;
    let bracket = n2 / n1 * v1 + n1 / n2 * v2;
    let t3 = 4.0 * total.powi(3);
    Ok([
        n1 / (4.0 * n12.powi(3)) * bracket,
        n2 / (4.0 * n12.powi(3)) * bracket,
        (n3 * n3 / n12 * (v1 + v2) + n12 * v3) / t3,
        (n3 * (v1 + v2) + n12 * n12 * v3 / n3) / t3,
    ])
}
