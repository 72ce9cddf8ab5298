//! Portable text record of a state.
//!
//! Pure states list their non-zero amplitudes as `(occupation, re, im)`;
//! mixed states list non-zero density-matrix elements as
//! `(row occupation, column occupation, re, im)`. The record is plain serde
//! data, so any serde format can carry it; the CLI writes JSON.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::space::FockSpace;
use super::state::{QuantumState, Representation};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceRecord {
    pub n_modes: usize,
    pub cutoff: usize,
    pub cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub space: SpaceRecord,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub amplitudes: Vec<(Vec<u16>, f64, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<(Vec<u16>, Vec<u16>, f64, f64)>,
    #[serde(default)]
    pub tail_mass: f64,
}

impl SpaceRecord {
    pub fn of(space: &FockSpace) -> Self {
        Self {
            n_modes: space.n_modes(),
            cutoff: space.cutoff(),
            cap: space.cap(),
        }
    }

    pub fn build(&self) -> Result<FockSpace> {
        match self.cap {
            Some(cap) => FockSpace::with_cap(self.n_modes, self.cutoff, cap),
            None => FockSpace::new(self.n_modes, self.cutoff),
        }
    }
}

impl StateRecord {
    pub fn from_state(state: &QuantumState) -> Self {
        let space = state.space();
        let mut record = Self {
            space: SpaceRecord::of(space),
            kind: StateKind::Pure,
            amplitudes: Vec::new(),
            elements: Vec::new(),
            tail_mass: state.tail_mass(),
        };
        match state.representation() {
            Representation::Pure(v) => {
                record.amplitudes = v
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != C64::default())
                    .map(|(i, c)| (space.occupation(i).to_vec(), c.re, c.im))
                    .collect();
            }
            Representation::Mixed(rho) => {
                record.kind = StateKind::Mixed;
                for r in 0..rho.nrows() {
                    for c in 0..rho.ncols() {
                        let v = rho[(r, c)];
                        if v != C64::default() {
                            record.elements.push((
                                space.occupation(r).to_vec(),
                                space.occupation(c).to_vec(),
                                v.re,
                                v.im,
                            ));
                        }
                    }
                }
            }
        }
        record
    }

    pub fn to_state(&self) -> Result<QuantumState> {
        let space = self.space.build()?;
        let index = |occ: &[u16]| {
            space
                .index_of(occ)
                .ok_or_else(|| Error::InvalidState(format!("occupation {occ:?} not in basis")))
        };
        let state = match self.kind {
            StateKind::Pure => {
                let mut amps = vec![C64::default(); space.dim()];
                for (occ, re, im) in &self.amplitudes {
                    amps[index(occ)?] = C64::new(*re, *im);
                }
                QuantumState::from_amplitudes(&space, amps)?
            }
            StateKind::Mixed => {
                let mut rho = DMatrix::<C64>::zeros(space.dim(), space.dim());
                for (row, col, re, im) in &self.elements {
                    rho[(index(row)?, index(col)?)] = C64::new(*re, *im);
                }
                QuantumState::from_density(&space, rho)?
            }
        };
        Ok(state.with_tail_mass(self.tail_mass))
    }
}
