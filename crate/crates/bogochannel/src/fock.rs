//! Truncated Fock space for two bosonic fields over a finite mode set.
//!
//! A [`ModeSet`] fixes an ordered list of mode labels shared by the two
//! fields. Oscillator slots are ordered canonically: all modes of field A
//! first, then all modes of field B. Basis states are mixed-radix integers
//! with slot 0 fastest, radix `cutoff + 1` per slot.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Two independent fields of the same type share every mode set.
pub const FIELDS_PER_MODE: usize = 2;

/// Default cap on the total Fock dimension `(cutoff+1)^(2 modes)`.
pub const DEFAULT_DIM_BUDGET: usize = 1 << 22;

/// Which of the two fields an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    A,
    B,
}

/// Finite mode set: distinct real labels, a per-oscillator occupation cutoff,
/// and the derived total Fock dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet {
    labels: Vec<f64>,
    cutoff: usize,
    dim: usize,
}

impl ModeSet {
    pub fn new(labels: &[f64], cutoff: usize) -> Result<Self> {
        Self::with_budget(labels, cutoff, DEFAULT_DIM_BUDGET)
    }

    pub fn with_budget(labels: &[f64], cutoff: usize, budget: usize) -> Result<Self> {
        if labels.is_empty() || cutoff < 1 {
            return Err(Error::InvalidModeSet);
        }
        for (i, a) in labels.iter().enumerate() {
            if !a.is_finite() || labels[i + 1..].iter().any(|b| b == a) {
                return Err(Error::InvalidModeSet);
            }
        }
        let per = cutoff + 1;
        let mut dim: usize = 1;
        for _ in 0..FIELDS_PER_MODE * labels.len() {
            dim = dim
                .checked_mul(per)
                .filter(|d| *d <= budget)
                .ok_or(Error::DimensionBudget { dim: usize::MAX, budget })?;
        }
        if dim > budget {
            return Err(Error::DimensionBudget { dim, budget });
        }
        Ok(ModeSet { labels: labels.to_vec(), cutoff, dim })
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    /// Total oscillator count: modes times fields.
    pub fn n_osc(&self) -> usize {
        FIELDS_PER_MODE * self.labels.len()
    }

    pub fn per_mode_dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Oscillator slot of `mode` on `field`: field A occupies slots
    /// `0..n_modes`, field B the slots `n_modes..2*n_modes`.
    pub fn slot(&self, field: Field, mode: usize) -> usize {
        match field {
            Field::A => mode,
            Field::B => self.labels.len() + mode,
        }
    }

    pub fn stride(&self, slot: usize) -> usize {
        self.per_mode_dim().pow(slot as u32)
    }

    pub fn occupation(&self, index: usize, slot: usize) -> usize {
        (index / self.stride(slot)) % self.per_mode_dim()
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.n_osc()).map(|s| self.occupation(index, s)).collect()
    }

    pub fn index_of(&self, occs: &[usize]) -> usize {
        let per = self.per_mode_dim();
        occs.iter().rev().fold(0, |acc, &n| acc * per + n)
    }

    pub fn max_occupation(&self, index: usize) -> usize {
        (0..self.n_osc()).map(|s| self.occupation(index, s)).max().unwrap()
    }

    /// True when any oscillator occupation lies in the top `band` levels.
    pub fn is_edge(&self, index: usize, band: usize) -> bool {
        band > 0 && self.max_occupation(index) + band > self.cutoff
    }

    /// Basis indices with every occupation at most `cutoff - margin`.
    pub fn interior_indices(&self, margin: usize) -> Vec<usize> {
        let cap = self.cutoff.saturating_sub(margin);
        (0..self.dim).filter(|&i| self.max_occupation(i) <= cap).collect()
    }

    /// Basis indices whose per-mode total occupation (field A plus field B)
    /// stays within the cutoff. Number-conserving sector operators restricted
    /// to this subspace are free of truncation artifacts.
    pub fn sector_complete_indices(&self) -> Vec<usize> {
        let m = self.n_modes();
        (0..self.dim)
            .filter(|&i| {
                (0..m).all(|k| self.occupation(i, k) + self.occupation(i, m + k) <= self.cutoff)
            })
            .collect()
    }
}

/// Compressed sparse row complex matrix. Rows are sorted by column and hold
/// no explicit zeros.
#[derive(Clone, Debug)]
pub struct CsMat {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<Complex64>,
}

impl CsMat {
    pub fn zero(n: usize) -> Self {
        CsMat { n, indptr: vec![0; n + 1], indices: Vec::new(), data: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CsMat {
            n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    pub fn from_triplets(n: usize, mut trips: Vec<(usize, usize, Complex64)>) -> Self {
        trips.sort_unstable_by_key(|t| (t.0, t.1));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(trips.len());
        for (r, c, v) in trips {
            match merged.last_mut() {
                Some((lr, lc, lv)) if *lr == r && *lc == c => *lv += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|t| t.2 != Complex64::new(0.0, 0.0));
        let mut indptr = vec![0usize; n + 1];
        for (r, _, _) in &merged {
            indptr[r + 1] += 1;
        }
        for r in 0..n {
            indptr[r + 1] += indptr[r];
        }
        let indices = merged.iter().map(|t| t.1).collect();
        let data = merged.iter().map(|t| t.2).collect();
        CsMat { n, indptr, indices, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for r in 0..self.n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            y[r] = acc;
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn adjoint(&self) -> CsMat {
        let mut trips = Vec::with_capacity(self.nnz());
        for r in 0..self.n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                trips.push((self.indices[k], r, self.data[k].conj()));
            }
        }
        CsMat::from_triplets(self.n, trips)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &CsMat, b: Complex64) -> CsMat {
        assert_eq!(self.n, other.n);
        let mut trips = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                trips.push((r, self.indices[k], a * self.data[k]));
            }
            for k in other.indptr[r]..other.indptr[r + 1] {
                trips.push((r, other.indices[k], b * other.data[k]));
            }
        }
        CsMat::from_triplets(self.n, trips)
    }

    pub fn scale(&self, a: Complex64) -> CsMat {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= a;
        }
        out
    }

    /// Sparse product, dense-accumulator SpGEMM.
    pub fn matmul(&self, other: &CsMat) -> CsMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut touched: Vec<usize> = Vec::new();
        let mut trips: Vec<(usize, usize, Complex64)> = Vec::new();
        for r in 0..n {
            touched.clear();
            for k in self.indptr[r]..self.indptr[r + 1] {
                let mid = self.indices[k];
                let v = self.data[k];
                for j in other.indptr[mid]..other.indptr[mid + 1] {
                    let c = other.indices[j];
                    if acc[c] == Complex64::new(0.0, 0.0) {
                        touched.push(c);
                    }
                    acc[c] += v * other.data[j];
                }
            }
            for &c in &touched {
                trips.push((r, c, acc[c]));
                acc[c] = Complex64::new(0.0, 0.0);
            }
        }
        CsMat::from_triplets(n, trips)
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum; bounds the spectral norm for Hermitian input.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|r| {
                self.data[self.indptr[r]..self.indptr[r + 1]]
                    .iter()
                    .map(|v| v.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.combine(Complex64::new(1.0, 0.0), &self.adjoint(), Complex64::new(-1.0, 0.0))
            .frob_norm()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                m[(r, self.indices[k])] = self.data[k];
            }
        }
        m
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        for k in self.indptr[r]..self.indptr[r + 1] {
            if self.indices[k] == c {
                return self.data[k];
            }
        }
        Complex64::new(0.0, 0.0)
    }
}

/// Sparse operator on the Fock basis together with a Hermiticity marker.
#[derive(Clone, Debug)]
pub struct FockOperator {
    pub mat: CsMat,
    pub hermitian: bool,
}

impl FockOperator {
    pub fn new(mat: CsMat) -> Self {
        let h = mat.hermiticity_residual() == 0.0;
        FockOperator { mat, hermitian: h }
    }

    pub fn dim(&self) -> usize {
        self.mat.n()
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.amplitudes.len() != self.dim() {
            return Err(Error::DimensionMismatch { got: v.amplitudes.len(), expected: self.dim() });
        }
        Ok(FockVector { modeset: v.modeset.clone(), amplitudes: self.mat.matvec(&v.amplitudes) })
    }
}

/// Single-oscillator annihilation matrix: entry `(n-1, n) = sqrt(n)`.
pub fn ladder_matrix(cutoff: usize) -> Result<FockOperator> {
    if cutoff < 1 {
        return Err(Error::InvalidModeSet);
    }
    let n = cutoff + 1;
    let trips = (1..n)
        .map(|k| (k - 1, k, Complex64::new((k as f64).sqrt(), 0.0)))
        .collect();
    Ok(FockOperator { mat: CsMat::from_triplets(n, trips), hermitian: false })
}

/// Embed a single-oscillator operator at `slot`, identity elsewhere.
pub fn embed_operator(op: &FockOperator, slot: usize, modeset: &ModeSet) -> Result<FockOperator> {
    let n_osc = modeset.n_osc();
    if slot >= n_osc {
        return Err(Error::SlotOutOfRange { slot, n_slots: n_osc });
    }
    let per = modeset.per_mode_dim();
    if op.dim() != per {
        return Err(Error::DimensionMismatch { got: op.dim(), expected: per });
    }
    let stride = modeset.stride(slot);
    let outer = modeset.dim() / (stride * per);
    let mut trips = Vec::with_capacity(op.mat.nnz() * stride * outer);
    for r in 0..per {
        for k in op.mat.indptr[r]..op.mat.indptr[r + 1] {
            let c = op.mat.indices[k];
            let v = op.mat.data[k];
            for hi in 0..outer {
                let base = hi * stride * per;
                for lo in 0..stride {
                    trips.push((base + r * stride + lo, base + c * stride + lo, v));
                }
            }
        }
    }
    Ok(FockOperator { mat: CsMat::from_triplets(modeset.dim(), trips), hermitian: op.hermitian })
}

/// State vector over the Fock basis of a mode set.
#[derive(Clone, Debug)]
pub struct FockVector {
    pub modeset: ModeSet,
    pub amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn zero(modeset: &ModeSet) -> Self {
        FockVector {
            modeset: modeset.clone(),
            amplitudes: vec![Complex64::new(0.0, 0.0); modeset.dim()],
        }
    }

    pub fn vacuum(modeset: &ModeSet) -> Self {
        let mut v = Self::zero(modeset);
        v.amplitudes[0] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn basis_state(modeset: &ModeSet, occs: &[usize]) -> Result<Self> {
        if occs.len() != modeset.n_osc() || occs.iter().any(|&n| n > modeset.cutoff()) {
            return Err(Error::InvalidParameter("occupations incompatible with mode set".into()));
        }
        let mut v = Self::zero(modeset);
        v.amplitudes[modeset.index_of(occs)] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Norm deficit `1 - |psi|^2`, the truncation-leakage diagnostic.
    pub fn leakage(&self) -> f64 {
        1.0 - self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
    }

    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability mass in the top `band` occupation levels of any oscillator.
    pub fn edge_mass(&self, band: usize) -> f64 {
        (0..self.amplitudes.len())
            .filter(|&i| self.modeset.is_edge(i, band))
            .map(|i| self.amplitudes[i].norm_sqr())
            .sum()
    }

    /// Zero the amplitudes in the top `band` levels; returns the removed mass.
    pub fn project_out_edge(&mut self, band: usize) -> f64 {
        let mut removed = 0.0;
        for i in 0..self.amplitudes.len() {
            if self.modeset.is_edge(i, band) {
                removed += self.amplitudes[i].norm_sqr();
                self.amplitudes[i] = Complex64::new(0.0, 0.0);
            }
        }
        removed
    }
}
