//! Exact coefficient representation of quadratic operators.
//!
//! A quadratic operator over oscillators `1..N` (N = 2 * modes, both fields)
//! is stored as the blocks of
//!
//! ```text
//! H = sum A_pq a†_p a_q + ½ sum B_pq a†_p a†_q + ½ sum C_pq a_p a_q + s
//! ```
//!
//! with `B`, `C` symmetric. `H` is Hermitian iff `A = A†`, `C = conj(B)` and
//! `s` is real. The commutator of two such operators closes on the same form,
//! so brackets are evaluated exactly, with no Fock-space truncation at all.
//! Assembled as a single `2N x 2N` array over the ordered basis
//! `(a_1..a_N, a†_1..a†_N)` the blocks read `[[A, B], [C, Aᵀ]]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{CsMat, FockOperator, ModeSet};

type CMat = DMatrix<Complex64>;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[derive(Clone, Debug)]
pub struct CoefficientMatrix {
    labels: Vec<f64>,
    a: CMat,
    b: CMat,
    c: CMat,
    scalar: Complex64,
}

impl CoefficientMatrix {
    pub fn zero(labels: &[f64]) -> Self {
        let n = 2 * labels.len();
        CoefficientMatrix {
            labels: labels.to_vec(),
            a: CMat::zeros(n, n),
            b: CMat::zeros(n, n),
            c: CMat::zeros(n, n),
            scalar: czero(),
        }
    }

    /// Build from raw blocks; `b` and `c` are symmetrized.
    pub fn from_blocks(labels: &[f64], a: CMat, b: CMat, c: CMat, scalar: Complex64) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let bs = (&b + b.transpose()) * half;
        let cs = (&c + c.transpose()) * half;
        CoefficientMatrix { labels: labels.to_vec(), a, b: bs, c: cs, scalar }
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn n_osc(&self) -> usize {
        self.a.nrows()
    }

    pub fn block_a(&self) -> &CMat {
        &self.a
    }

    pub fn block_b(&self) -> &CMat {
        &self.b
    }

    pub fn block_c(&self) -> &CMat {
        &self.c
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.scalar
    }

    pub fn add_number_term(&mut self, p: usize, q: usize, v: Complex64) {
        self.a[(p, q)] += v;
    }

    /// Adds `v * a†_p a†_q` preserving block symmetry.
    pub fn add_raising_term(&mut self, p: usize, q: usize, v: Complex64) {
        if p == q {
            self.b[(p, p)] += v * 2.0;
        } else {
            self.b[(p, q)] += v;
            self.b[(q, p)] += v;
        }
    }

    /// Adds `v * a_p a_q` preserving block symmetry.
    pub fn add_lowering_term(&mut self, p: usize, q: usize, v: Complex64) {
        if p == q {
            self.c[(p, p)] += v * 2.0;
        } else {
            self.c[(p, q)] += v;
            self.c[(q, p)] += v;
        }
    }

    /// The `2N x 2N` array over the basis `(a_1..a_N, a†_1..a†_N)`.
    pub fn entries(&self) -> CMat {
        let n = self.n_osc();
        let mut m = CMat::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, n)).copy_from(&self.b);
        m.view_mut((n, 0), (n, n)).copy_from(&self.c);
        m.view_mut((n, n), (n, n)).copy_from(&self.a.transpose());
        m
    }

    pub fn norm(&self) -> f64 {
        (self.a.norm_squared() * 2.0
            + self.b.norm_squared()
            + self.c.norm_squared()
            + self.scalar.norm_sqr())
        .sqrt()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let adj = (&self.a - self.a.adjoint()).norm();
        let cross = (&self.c - self.b.map(|v| v.conj())).norm();
        let sym = (&self.b - self.b.transpose()).norm() + (&self.c - self.c.transpose()).norm();
        adj + cross + sym + self.scalar.im.abs()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() == 0.0
    }

    /// Entrywise symmetry under interchange of the two fields
    /// (oscillator `p` of field A maps to oscillator `p + M` of field B).
    pub fn is_field_symmetric(&self) -> bool {
        let m = self.labels.len();
        let n = self.n_osc();
        let swap = |p: usize| if p < m { p + m } else { p - m };
        for p in 0..n {
            for q in 0..n {
                if self.a[(p, q)] != self.a[(swap(p), swap(q))]
                    || self.b[(p, q)] != self.b[(swap(p), swap(q))]
                    || self.c[(p, q)] != self.c[(swap(p), swap(q))]
                {
                    return false;
                }
            }
        }
        true
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CoefficientMatrix {
            labels: self.labels.clone(),
            a: &self.a * s,
            b: &self.b * s,
            c: &self.c * s,
            scalar: self.scalar * s,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.labels != other.labels {
            return Err(Error::ModeSetMismatch);
        }
        Ok(CoefficientMatrix {
            labels: self.labels.clone(),
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            c: &self.c + &other.c,
            scalar: self.scalar + other.scalar,
        })
    }

    /// Adjoint action on the column `(a_1..a_N, a†_1..a†_N)`:
    /// `[H, w] = S w` with `S = [[-A, -B], [C, Aᵀ]]`.
    pub fn adjoint_action(&self) -> CMat {
        let n = self.n_osc();
        let mut s = CMat::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(&(-&self.a));
        s.view_mut((0, n), (n, n)).copy_from(&(-&self.b));
        s.view_mut((n, 0), (n, n)).copy_from(&self.c);
        s.view_mut((n, n), (n, n)).copy_from(&self.a.transpose());
        s
    }

    /// Realize the operator as a sparse matrix on the truncated Fock basis.
    pub fn to_fock(&self, modeset: &ModeSet) -> Result<FockOperator> {
        if self.labels != modeset.labels() {
            return Err(Error::ModeSetMismatch);
        }
        let n = self.n_osc();
        let dim = modeset.dim();
        let cutoff = modeset.cutoff();
        // collect nonzero coefficient entries once
        let mut num: Vec<(usize, usize, Complex64)> = Vec::new();
        let mut raise: Vec<(usize, usize, Complex64)> = Vec::new();
        let mut lower: Vec<(usize, usize, Complex64)> = Vec::new();
        for p in 0..n {
            for q in 0..n {
                if self.a[(p, q)] != czero() {
                    num.push((p, q, self.a[(p, q)]));
                }
                if q >= p {
                    let w = if p == q {
                        self.b[(p, p)] * 0.5
                    } else {
                        self.b[(p, q)]
                    };
                    if w != czero() {
                        raise.push((p, q, w));
                    }
                    let w = if p == q {
                        self.c[(p, p)] * 0.5
                    } else {
                        self.c[(p, q)]
                    };
                    if w != czero() {
                        lower.push((p, q, w));
                    }
                }
            }
        }
        let mut trips: Vec<(usize, usize, Complex64)> = Vec::new();
        for idx in 0..dim {
            let occs = modeset.occupations(idx);
            let mut diag = self.scalar;
            for &(p, q, v) in &num {
                if p == q {
                    diag += v * occs[p] as f64;
                } else if occs[q] >= 1 && occs[p] < cutoff {
                    let target = idx + modeset.stride(p) - modeset.stride(q);
                    let amp = (occs[q] as f64 * (occs[p] + 1) as f64).sqrt();
                    trips.push((target, idx, v * amp));
                }
            }
            for &(p, q, v) in &raise {
                if p == q {
                    if occs[p] + 2 <= cutoff {
                        let target = idx + 2 * modeset.stride(p);
                        let amp = ((occs[p] + 1) as f64 * (occs[p] + 2) as f64).sqrt();
                        trips.push((target, idx, v * amp));
                    }
                } else if occs[p] < cutoff && occs[q] < cutoff {
                    let target = idx + modeset.stride(p) + modeset.stride(q);
                    let amp = ((occs[p] + 1) as f64 * (occs[q] + 1) as f64).sqrt();
                    trips.push((target, idx, v * amp));
                }
            }
            for &(p, q, v) in &lower {
                if p == q {
                    if occs[p] >= 2 {
                        let target = idx - 2 * modeset.stride(p);
                        let amp = (occs[p] as f64 * (occs[p] - 1) as f64).sqrt();
                        trips.push((target, idx, v * amp));
                    }
                } else if occs[p] >= 1 && occs[q] >= 1 {
                    let target = idx - modeset.stride(p) - modeset.stride(q);
                    let amp = (occs[p] as f64 * occs[q] as f64).sqrt();
                    trips.push((target, idx, v * amp));
                }
            }
            if diag != czero() {
                trips.push((idx, idx, diag));
            }
        }
        let mat = CsMat::from_triplets(dim, trips);
        let hermitian = self.is_hermitian();
        Ok(FockOperator { mat, hermitian })
    }
}

/// Exact commutator `[K1, K2]` through the closed quadratic algebra,
/// including the scalar produced by double contractions.
pub fn quad_bracket(k1: &CoefficientMatrix, k2: &CoefficientMatrix) -> Result<CoefficientMatrix> {
    if k1.labels != k2.labels {
        return Err(Error::ModeSetMismatch);
    }
    let (a1, b1, c1) = (&k1.a, &k1.b, &k1.c);
    let (a2, b2, c2) = (&k2.a, &k2.b, &k2.c);
    let a3 = a1 * a2 - a2 * a1 + b2 * c1 - b1 * c2;
    let b3 = a1 * b2 + b2 * a1.transpose() - a2 * b1 - b1 * a2.transpose();
    let c3 = c1 * a2 + a2.transpose() * c1 - c2 * a1 - a1.transpose() * c2;
    let s3 = ((c1 * b2).trace() - (c2 * b1).trace()) * 0.5;
    Ok(CoefficientMatrix {
        labels: k1.labels.clone(),
        a: a3,
        b: b3,
        c: c3,
        scalar: s3,
    })
}

/// Dense matrix exponential by scaling and squaring with a Taylor core.
/// Sized for the small adjoint-action matrices used here.
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let norm = m.camax(); // max absolute entry
    let scale_pow = if norm > 0.25 {
        ((norm / 0.25).log2().ceil() as i32).max(0)
    } else {
        0
    };
    let x = m / Complex64::new(2f64.powi(scale_pow), 0.0);
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..=40 {
        term = (&term * &x) / Complex64::new(k as f64, 0.0);
        sum += &term;
        if term.camax() < 1e-18 {
            break;
        }
    }
    for _ in 0..scale_pow {
        sum = &sum * &sum;
    }
    sum
}

/// Linear Heisenberg map on `(a, a†)` induced by `U = exp(iH)`:
/// `a'_r = sum_q alpha_rq a_q + beta_rq a†_q`.
#[derive(Clone, Debug)]
pub struct BogolyubovMap {
    pub alpha: CMat,
    pub beta: CMat,
}

impl BogolyubovMap {
    pub fn identity(n: usize) -> Self {
        BogolyubovMap { alpha: CMat::identity(n, n), beta: CMat::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.alpha.nrows()
    }

    /// Residuals of `alpha alpha† - beta beta† = 1` and `alpha betaᵀ` symmetric.
    pub fn canonicality_residuals(&self) -> (f64, f64) {
        let n = self.n();
        let r1 = (&self.alpha * self.alpha.adjoint()
            - &self.beta * self.beta.adjoint()
            - CMat::identity(n, n))
            .norm();
        let ab = &self.alpha * self.beta.transpose();
        let r2 = (&ab - ab.transpose()).norm();
        (r1, r2)
    }

    /// Composition: the map of `U_self * U_other` acting after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        let alpha = &self.alpha * &other.alpha + &self.beta * other.beta.map(|v| v.conj());
        let beta = &self.alpha * &other.beta + &self.beta * other.alpha.map(|v| v.conj());
        BogolyubovMap { alpha, beta }
    }

    /// Largest squeezing singular value, `max sigma(beta)`.
    pub fn max_squeeze(&self) -> f64 {
        let bbh = &self.beta * self.beta.adjoint();
        bbh.symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.max(0.0)))
            .sqrt()
    }
}

/// Heisenberg-picture Bogolyubov map of `U = exp(iH)` via the exponential of
/// the adjoint action, `T = exp(-iS)`.
pub fn bogoliubov_of(h: &CoefficientMatrix) -> Result<BogolyubovMap> {
    let hres = h.hermiticity_residual();
    if hres > 1e-12 * (1.0 + h.norm()) {
        return Err(Error::NonHermitian { residual: hres });
    }
    let n = h.n_osc();
    let s = h.adjoint_action() * Complex64::new(0.0, -1.0);
    let t = expm(&s);
    let alpha = t.view((0, 0), (n, n)).into_owned();
    let beta = t.view((0, n), (n, n)).into_owned();
    let map = BogolyubovMap { alpha, beta };
    let (r1, r2) = map.canonicality_residuals();
    if r1.max(r2) > 1e-6 * (1.0 + map.alpha.norm()) {
        return Err(Error::Canonicality { residual: r1.max(r2) });
    }
    Ok(map)
}
