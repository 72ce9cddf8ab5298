use num_complex::Complex64 as C64;

use super::space::FockSpace;
use crate::error::{Error, Result};

/// Sparse complex matrix in compressed-row form, acting on the occupation
/// basis of a [`FockSpace`].
#[derive(Clone, Debug)]
pub struct SparseOp {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOp {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            debug_assert!(r < dim && c < dim);
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
        .pruned()
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let triplets = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), triplets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.row(r)
            .find(|&(col, _)| col == c)
            .map(|(_, v)| v)
            .unwrap_or_default()
    }

    fn pruned(mut self) -> Self {
        if self.vals.iter().all(|v| *v != C64::default()) {
            return self;
        }
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                if v != C64::default() {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
        self
    }

    pub fn adjoint(&self) -> Self {
        let triplets = self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.dim, triplets)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= factor);
        out.pruned()
    }

    /// `Σ cₖ Aₖ` over operators of equal dimension.
    pub fn combination(dim: usize, terms: &[(C64, &SparseOp)]) -> Self {
        let triplets = terms
            .iter()
            .flat_map(|(coef, op)| {
                assert_eq!(op.dim, dim, "operator dimension mismatch");
                op.triplets().map(move |(r, c, v)| (r, c, *coef * v))
            })
            .collect();
        Self::from_triplets(dim, triplets)
    }

    pub fn add(&self, other: &SparseOp) -> Self {
        let one = C64::new(1.0, 0.0);
        Self::combination(self.dim, &[(one, self), (one, other)])
    }

    pub fn sub(&self, other: &SparseOp) -> Self {
        Self::combination(
            self.dim,
            &[(C64::new(1.0, 0.0), self), (C64::new(-1.0, 0.0), other)],
        )
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &SparseOp) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        let mut acc = vec![C64::default(); self.dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut marked = vec![false; self.dim];
        let mut triplets = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !marked[c] {
                        marked[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                triplets.push((r, c, acc[c]));
                acc[c] = C64::default();
                marked[c] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.dim, triplets)
    }

    pub fn commutator(&self, other: &SparseOp) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector dimension mismatch");
        (0..self.dim)
            .map(|r| self.row(r).map(|(c, a)| a * v[c]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of `A − A⁺`.
    pub fn hermiticity_residual(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }
}

/// The per-mode generators `a`, `a⁺`, `n̂` of a Fock space. Every other
/// operator in the crate is composed from these.
pub struct ModeOperators<'a> {
    space: &'a FockSpace,
}

impl<'a> ModeOperators<'a> {
    pub fn new(space: &'a FockSpace) -> Self {
        Self { space }
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.space.n_modes() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "mode {mode} out of range for {} modes",
                self.space.n_modes()
            )))
        }
    }

    /// Annihilation operator `a` of `mode` (0-based).
    pub fn annihilation(&self, mode: usize) -> Result<SparseOp> {
        self.check_mode(mode)?;
        let s = self.space;
        let mut triplets = Vec::new();
        let mut target = vec![0u16; s.n_modes()];
        for col in 0..s.dim() {
            let occ = s.occupation(col);
            let n = occ[mode];
            if n == 0 {
                continue;
            }
            target.copy_from_slice(occ);
            target[mode] -= 1;
            if let Some(row) = s.index_of(&target) {
                triplets.push((row, col, C64::new((n as f64).sqrt(), 0.0)));
            }
        }
        Ok(SparseOp::from_triplets(s.dim(), triplets))
    }

    /// Creation operator `a⁺`; states pushed past the cutoff or cap are lost.
    pub fn creation(&self, mode: usize) -> Result<SparseOp> {
        Ok(self.annihilation(mode)?.adjoint())
    }

    pub fn number(&self, mode: usize) -> Result<SparseOp> {
        self.check_mode(mode)?;
        let diag: Vec<C64> = self
            .space
            .iter()
            .map(|occ| C64::new(occ[mode] as f64, 0.0))
            .collect();
        Ok(SparseOp::diagonal(&diag))
    }

    /// `aᵢ⁺ aⱼ`, composed as a product of the primitives.
    pub fn hop(&self, i: usize, j: usize) -> Result<SparseOp> {
        Ok(self.creation(i)?.matmul(&self.annihilation(j)?))
    }

    /// `Σ cⱼ aⱼ⁺`: creation operator of the superposition mode with
    /// coefficients `coeffs`.
    pub fn creation_combination(&self, coeffs: &[C64]) -> Result<SparseOp> {
        if coeffs.len() != self.space.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.space.n_modes(),
                found: coeffs.len(),
            });
        }
        let ops = (0..coeffs.len())
            .map(|j| self.creation(j))
            .collect::<Result<Vec<_>>>()?;
        let terms: Vec<_> = coeffs.iter().copied().zip(ops.iter()).collect();
        Ok(SparseOp::combination(self.space.dim(), &terms))
    }

    /// `Σ cⱼ* aⱼ`: annihilation operator of the superposition mode.
    pub fn annihilation_combination(&self, coeffs: &[C64]) -> Result<SparseOp> {
        Ok(self.creation_combination(coeffs)?.adjoint())
    }

    pub fn total_number(&self) -> SparseOp {
        let diag: Vec<C64> = self
            .space
            .iter()
            .map(|occ| C64::new(occ.iter().map(|&n| n as f64).sum(), 0.0))
            .collect();
        SparseOp::diagonal(&diag)
    }
}
