use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest number of modes the engine accepts.
pub const MAX_MODES: usize = 6;

/// Largest basis the engine will materialize.
pub const MAX_DIM: usize = 1 << 24;

/// A truncated multimode bosonic Hilbert space.
///
/// Each mode carries the photon numbers `0..=cutoff`; an optional cap bounds
/// the total photon number. Basis states are ordered lexicographically over
/// `(n₁, n₂, …)` with mode 1 varying slowest.
///
/// Cloning is cheap: the basis tables are shared.
#[derive(Clone)]
pub struct FockSpace {
    inner: Arc<Inner>,
}

struct Inner {
    n_modes: usize,
    cutoff: usize,
    cap: Option<usize>,
    /// Flat `dim × n_modes` occupation table.
    occupations: Vec<u16>,
    /// Only built for capped spaces; uncapped ones index arithmetically.
    lookup: Option<HashMap<u64, usize>>,
}

impl FockSpace {
    pub fn new(n_modes: usize, cutoff: usize) -> Result<Self> {
        Self::build(n_modes, cutoff, None)
    }

    pub fn with_cap(n_modes: usize, cutoff: usize, cap: usize) -> Result<Self> {
        Self::build(n_modes, cutoff, Some(cap))
    }

    /// Space of `n_modes` holding every state with at most `total` photons and
    /// nothing else. Bilinear operators `aᵢ⁺aⱼ` are exact on such a space.
    pub fn photon_sector(n_modes: usize, total: usize) -> Result<Self> {
        Self::build(n_modes, total, Some(total))
    }

    fn build(n_modes: usize, cutoff: usize, cap: Option<usize>) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::Domain(format!(
                "mode count must be in 1..={MAX_MODES}, got {n_modes}"
            )));
        }
        if cutoff > u16::MAX as usize {
            return Err(Error::Domain(format!("cutoff {cutoff} too large")));
        }
        // A cap above n_modes * cutoff prunes nothing.
        let cap = cap.filter(|&c| c < n_modes * cutoff);

        let radix = cutoff as u64 + 1;
        let dense_dim = (radix as f64).powi(n_modes as i32);
        if cap.is_none() && dense_dim > MAX_DIM as f64 {
            return Err(Error::Capacity(format!(
                "basis of {n_modes} modes with cutoff {cutoff} has {dense_dim:.3e} states"
            )));
        }

        let mut occupations = Vec::new();
        let mut current = vec![0u16; n_modes];
        enumerate(
            &mut current,
            0,
            cutoff,
            cap.unwrap_or(usize::MAX),
            &mut occupations,
        )?;

        let lookup = cap.map(|_| {
            occupations
                .chunks_exact(n_modes)
                .enumerate()
                .map(|(i, occ)| (pack(occ, radix), i))
                .collect()
        });

        Ok(Self {
            inner: Arc::new(Inner {
                n_modes,
                cutoff,
                cap,
                occupations,
                lookup,
            }),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.inner.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.inner.cutoff
    }

    /// The effective total-photon cap; `None` when it prunes nothing.
    pub fn cap(&self) -> Option<usize> {
        self.inner.cap
    }

    pub fn dim(&self) -> usize {
        self.inner.occupations.len() / self.inner.n_modes
    }

    /// Largest total photon number representable in this space.
    pub fn max_total(&self) -> usize {
        self.inner
            .cap
            .unwrap_or(self.inner.n_modes * self.inner.cutoff)
    }

    pub fn occupation(&self, index: usize) -> &[u16] {
        let m = self.inner.n_modes;
        &self.inner.occupations[index * m..(index + 1) * m]
    }

    pub fn total_photons(&self, index: usize) -> usize {
        self.occupation(index).iter().map(|&n| n as usize).sum()
    }

    pub fn index_of(&self, occupation: &[u16]) -> Option<usize> {
        let inner = &self.inner;
        if occupation.len() != inner.n_modes
            || occupation.iter().any(|&n| n as usize > inner.cutoff)
        {
            return None;
        }
        let radix = inner.cutoff as u64 + 1;
        match &inner.lookup {
            Some(map) => map.get(&pack(occupation, radix)).copied(),
            None => Some(pack(occupation, radix) as usize),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u16]> + '_ {
        self.inner.occupations.chunks_exact(self.inner.n_modes)
    }

    /// True when the basis state sits in one of the top `layers` Fock layers
    /// of some mode, or within `layers` of the total-photon cap.
    pub fn near_boundary(&self, index: usize, layers: usize) -> bool {
        let cutoff = self.inner.cutoff;
        let per_mode = self
            .occupation(index)
            .iter()
            .any(|&n| n as usize + layers > cutoff);
        let total = match self.inner.cap {
            Some(cap) => self.total_photons(index) + layers > cap,
            None => false,
        };
        per_mode || total
    }

    pub fn same_as(&self, other: &FockSpace) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self == other
    }

    pub(crate) fn check_same(&self, other: &FockSpace) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }
}

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n_modes == other.inner.n_modes
            && self.inner.cutoff == other.inner.cutoff
            && self.inner.cap == other.inner.cap
    }
}

impl fmt::Debug for FockSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockSpace")
            .field("n_modes", &self.inner.n_modes)
            .field("cutoff", &self.inner.cutoff)
            .field("cap", &self.inner.cap)
            .field("dim", &self.dim())
            .finish()
    }
}

fn pack(occupation: &[u16], radix: u64) -> u64 {
    occupation
        .iter()
        .fold(0u64, |code, &n| code * radix + n as u64)
}

fn enumerate(
    current: &mut [u16],
    mode: usize,
    cutoff: usize,
    budget: usize,
    out: &mut Vec<u16>,
) -> Result<()> {
    if mode == current.len() {
        if out.len() / current.len() >= MAX_DIM {
            return Err(Error::Capacity(format!("basis exceeds {MAX_DIM} states")));
        }
        out.extend_from_slice(current);
        return Ok(());
    }
    for n in 0..=cutoff.min(budget) {
        current[mode] = n as u16;
        enumerate(current, mode + 1, cutoff, budget - n, out)?;
    }
    current[mode] = 0;
    Ok(())
}
