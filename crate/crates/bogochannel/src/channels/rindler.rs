//! Accelerated-observer kernel: mixing between inertial plane-wave modes and
//! the modes of the two causally disjoint wedges seen at proper acceleration
//! `a` (natural units, `c = 1`).
//!
//! The mixing coefficient for wedge frequencies `k` and inertial `l` is
//!
//! ```text
//! alpha_kl = k / (4 pi a sqrt|kl|) * (a/(il))^{ik/a} * (sgn k + sgn l) * Gamma(ik/a)
//! ```
//!
//! which vanishes identically for opposite signs. The transformation mixes
//! all frequencies and is not a finite unitary on a truncated Fock space, so
//! this module works with windowed quadrature: a uniform grid over wedge
//! frequencies and a log-spaced grid over inertial frequencies. The `matched`
//! constructor picks the wedge window width `2 pi a / (log step)` with as
//! many points as the inertial grid; at that resolution the discrete delta
//! normalization of the canonical constraints and the unit commutators of the
//! windowed wedge modes hold exactly up to quadrature error.
//!
//! The invariant observable splits into wedge parts
//! `-i integral (b† b̃ - b b̃†)`; expectation values on encoded states are
//! evaluated through the kernel without ever forming the infinite transform.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{embed_operator, ladder_matrix, CsMat, FockOperator, ModeSet};
use crate::special::gamma;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Wedge-inertial mixing coefficient; exactly zero for opposite-sign
/// frequencies.
pub fn rindler_alpha(k: f64, l: f64, a: f64) -> Result<Complex64> {
    if k == 0.0 || l == 0.0 || a <= 0.0 {
        return Err(Error::InvalidParameter(
            "rindler_alpha needs k != 0, l != 0, a > 0".into(),
        ));
    }
    if k.signum() != l.signum() {
        return Ok(c(0.0, 0.0));
    }
    let pre = k / (4.0 * std::f64::consts::PI * a * (k * l).abs().sqrt());
    let base = c(a, 0.0) / c(0.0, l);
    let power = base.powc(c(0.0, k / a));
    let g = gamma(c(0.0, k / a))?;
    let out = pre * power * (k.signum() + l.signum()) * g;
    if !out.re.is_finite() || !out.im.is_finite() {
        return Err(Error::SpecialFunction(format!("alpha overflow at k={k}, l={l}")));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wedge {
    I,
    II,
}

/// Windowed quadrature kernel over positive frequencies.
#[derive(Clone, Debug)]
pub struct RindlerKernel {
    acceleration: f64,
    k_points: Vec<f64>,
    k_weight: f64,
    l_points: Vec<f64>,
    l_weights: Vec<f64>,
    /// `alpha[ik * n_l + il]`
    table: Vec<Complex64>,
}

impl RindlerKernel {
    /// Kernel over explicit windows: `k` uniform midpoint, `l` log midpoint.
    pub fn new(
        acceleration: f64,
        k_window: (f64, f64, usize),
        l_window: (f64, f64, usize),
    ) -> Result<Self> {
        let (k_min, k_max, n_k) = k_window;
        let (l_min, l_max, n_l) = l_window;
        if acceleration <= 0.0 || k_min < 0.0 || k_max <= k_min || n_k < 2 {
            return Err(Error::InvalidParameter("bad wedge-frequency window".into()));
        }
        if l_min <= 0.0 || l_max <= l_min || n_l < 2 {
            return Err(Error::InvalidParameter("bad inertial-frequency window".into()));
        }
        let dk = (k_max - k_min) / n_k as f64;
        let k_points: Vec<f64> = (0..n_k).map(|j| k_min + (j as f64 + 0.5) * dk).collect();
        let du = (l_max / l_min).ln() / n_l as f64;
        let l_points: Vec<f64> = (0..n_l)
            .map(|j| (l_min.ln() + (j as f64 + 0.5) * du).exp())
            .collect();
        let l_weights: Vec<f64> = l_points.iter().map(|l| l * du).collect();
        let mut table = Vec::with_capacity(n_k * n_l);
        for &k in &k_points {
            for &l in &l_points {
                table.push(rindler_alpha(k, l, acceleration)?);
            }
        }
        Ok(RindlerKernel {
            acceleration,
            k_points,
            k_weight: dk,
            l_points,
            l_weights,
            table,
        })
    }

    /// Matched resolution: the wedge window `(0, 2 pi a / du)` with `n_l`
    /// points, where `du` is the log step of the inertial grid. At this
    /// pairing the discrete constraints reproduce their continuum values
    /// without adjustable factors.
    pub fn matched(acceleration: f64, l_min: f64, l_max: f64, n_l: usize) -> Result<Self> {
        if l_min <= 0.0 || l_max <= l_min || n_l < 2 {
            return Err(Error::InvalidParameter("bad inertial-frequency window".into()));
        }
        let du = (l_max / l_min).ln() / n_l as f64;
        let k_max = 2.0 * std::f64::consts::PI * acceleration / du;
        Self::new(acceleration, (0.0, k_max, n_l), (l_min, l_max, n_l))
    }

    /// Same windows, `factor` times as many wedge-frequency points.
    pub fn refined_k(&self, factor: usize) -> Result<Self> {
        let n_k = self.k_points.len() * factor;
        let k_min = self.k_points[0] - 0.5 * self.k_weight;
        let k_max = self.k_points.last().unwrap() + 0.5 * self.k_weight;
        let n_l = self.l_points.len();
        let l_min = self.l_points[0] / (0.5f64 * self.log_step()).exp();
        let l_max = self.l_points[n_l - 1] * (0.5f64 * self.log_step()).exp();
        Self::new(self.acceleration, (k_min, k_max, n_k), (l_min, l_max, n_l))
    }

    /// Matched kernel over the same inertial window with `factor` times as
    /// many points on both grids. Relative constraint residuals scale down
    /// linearly with the refinement.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let n_l = self.l_points.len();
        let l_min = self.l_points[0] / (0.5f64 * self.log_step()).exp();
        let l_max = self.l_points[n_l - 1] * (0.5f64 * self.log_step()).exp();
        Self::matched(self.acceleration, l_min, l_max, n_l * factor)
    }

    pub fn acceleration(&self) -> f64 {
        self.acceleration
    }

    pub fn k_points(&self) -> &[f64] {
        &self.k_points
    }

    pub fn l_points(&self) -> &[f64] {
        &self.l_points
    }

    pub fn l_weights(&self) -> &[f64] {
        &self.l_weights
    }

    fn log_step(&self) -> f64 {
        (self.l_points[1] / self.l_points[0]).ln()
    }

    pub fn alpha(&self, ik: usize, il: usize) -> Complex64 {
        self.table[ik * self.l_points.len() + il]
    }

    /// First canonical constraint, `sum_k w (alpha*_kl alpha_kp -
    /// alpha_kl alpha*_kp e^{-2 pi k / a})`, which targets the discrete delta
    /// `delta_lp / w_l`.
    pub fn first_constraint(&self, il: usize, ip: usize) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for ik in 0..self.k_points.len() {
            let e = (-2.0 * std::f64::consts::PI * self.k_points[ik] / self.acceleration).exp();
            let al = self.alpha(ik, il);
            let ap = self.alpha(ik, ip);
            acc += (al.conj() * ap - al * ap.conj() * e) * self.k_weight;
        }
        acc
    }

    /// Second canonical constraint, `sum_k w e^{-pi k / a}
    /// (alpha*_kl alpha_kp - alpha_kl alpha*_kp)`, which targets zero.
    pub fn second_constraint(&self, il: usize, ip: usize) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for ik in 0..self.k_points.len() {
            let e = (-std::f64::consts::PI * self.k_points[ik] / self.acceleration).exp();
            let al = self.alpha(ik, il);
            let ap = self.alpha(ik, ip);
            acc += (al.conj() * ap - al * ap.conj()) * e * self.k_weight;
        }
        acc
    }

    /// Discretized constraint residuals over every `(l, p)` pair, relative to
    /// the discrete delta normalization `1/w_l`.
    pub fn constraint_report(&self) -> ConstraintReport {
        let n_l = self.l_points.len();
        let mut diagonal = Vec::with_capacity(n_l);
        let mut delta_scale = Vec::with_capacity(n_l);
        let mut max_diag_rel_err = 0.0f64;
        for il in 0..n_l {
            let d = self.first_constraint(il, il);
            let scale = 1.0 / self.l_weights[il];
            diagonal.push(d);
            delta_scale.push(scale);
            max_diag_rel_err = max_diag_rel_err.max((d - scale).norm() / scale);
        }
        let mut max_offdiag_rel = 0.0f64;
        let mut max_second_rel = 0.0f64;
        for il in 0..n_l {
            for ip in 0..n_l {
                let scale = (delta_scale[il] * delta_scale[ip]).sqrt();
                if ip != il {
                    let v = self.first_constraint(il, ip).norm() / scale;
                    max_offdiag_rel = max_offdiag_rel.max(v);
                }
                let s = self.second_constraint(il, ip).norm() / scale;
                max_second_rel = max_second_rel.max(s);
            }
        }
        ConstraintReport { delta_scale, diagonal, max_diag_rel_err, max_offdiag_rel, max_second_rel }
    }

    /// Unit-commutator residuals of the windowed wedge modes:
    /// `w_p sum_l w_l |alpha_pl|^2 (1 - e^{-2 pi p / a}) - 1` per wedge point.
    pub fn mode_canonicity(&self) -> Vec<f64> {
        (0..self.k_points.len())
            .map(|ik| {
                let e = (-2.0 * std::f64::consts::PI * self.k_points[ik] / self.acceleration).exp();
                let s: f64 = (0..self.l_points.len())
                    .map(|il| self.l_weights[il] * self.alpha(ik, il).norm_sqr())
                    .sum();
                self.k_weight * s * (1.0 - e) - 1.0
            })
            .collect()
    }

    /// Split the invariant observable into wedge parts with uniform unit
    /// weight over the wedge window.
    pub fn regional_split(&self) -> (WedgeObservable, WedgeObservable) {
        let n = self.k_points.len();
        let rho = vec![1.0 / n as f64; n];
        (
            WedgeObservable::new(self, Wedge::I, rho.clone()),
            WedgeObservable::new(self, Wedge::II, rho),
        )
    }

    /// Wedge parts with caller-chosen wedge-frequency weights.
    pub fn regional_split_weighted(&self, rho: &[f64]) -> Result<(WedgeObservable, WedgeObservable)> {
        if rho.len() != self.k_points.len() {
            return Err(Error::DimensionMismatch {
                got: rho.len(),
                expected: self.k_points.len(),
            });
        }
        if rho.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::WeightSum { deviation: f64::NAN });
        }
        Ok((
            WedgeObservable::new(self, Wedge::I, rho.to_vec()),
            WedgeObservable::new(self, Wedge::II, rho.to_vec()),
        ))
    }
}

#[derive(Clone, Debug)]
pub struct ConstraintReport {
    pub delta_scale: Vec<f64>,
    pub diagonal: Vec<Complex64>,
    pub max_diag_rel_err: f64,
    pub max_offdiag_rel: f64,
    pub max_second_rel: f64,
}

/// Per-mode cross-field second moments of a product state, enough to
/// evaluate any wedge expectation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CrossCorrelators {
    /// `<a† b>`
    pub exchange: Complex64,
    /// `<a b†>`
    pub exchange_conj: Complex64,
    /// `<a† b†>`
    pub pair_creation: Complex64,
    /// `<a b>`
    pub pair_annihilation: Complex64,
}

impl CrossCorrelators {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Correlators of the rotated-mode eigenstate with eigenvalue `lambda`.
    pub fn eigenstate(lambda: i64) -> Self {
        CrossCorrelators {
            exchange: c(0.0, lambda as f64 / 2.0),
            exchange_conj: c(0.0, -(lambda as f64) / 2.0),
            pair_creation: c(0.0, 0.0),
            pair_annihilation: c(0.0, 0.0),
        }
    }
}

/// One wedge part of the invariant observable: weights over the wedge window
/// plus the precomputed unit-commutator factors of the windowed wedge modes.
#[derive(Clone, Debug)]
pub struct WedgeObservable {
    pub wedge: Wedge,
    rho: Vec<f64>,
    canonicity: Vec<f64>,
}

impl WedgeObservable {
    fn new(kernel: &RindlerKernel, wedge: Wedge, rho: Vec<f64>) -> Self {
        let canonicity = kernel.mode_canonicity().iter().map(|r| 1.0 + r).collect();
        WedgeObservable { wedge, rho, canonicity }
    }

    pub fn window_weight(&self) -> f64 {
        self.rho.iter().sum()
    }

    /// Expectation value on a product state with the given per-inertial-mode
    /// correlators. Pair terms cancel in the wedge combination, so only the
    /// exchange difference enters; both wedges give the same value.
    pub fn expectation(&self, kernel: &RindlerKernel, corr: &[CrossCorrelators]) -> Result<f64> {
        let n_l = kernel.l_points.len();
        if corr.len() != n_l {
            return Err(Error::DimensionMismatch { got: corr.len(), expected: n_l });
        }
        let mut total = c(0.0, 0.0);
        for (ik, rho) in self.rho.iter().enumerate() {
            let e2 = (-2.0 * std::f64::consts::PI * kernel.k_points[ik] / kernel.acceleration).exp();
            let mut acc = c(0.0, 0.0);
            for il in 0..n_l {
                let asq = kernel.alpha(ik, il).norm_sqr();
                acc += kernel.l_weights[il]
                    * asq
                    * (corr[il].exchange - corr[il].exchange_conj)
                    * (1.0 - e2);
            }
            total += c(0.0, -rho * kernel.k_weight) * acc;
        }
        Ok(total.re)
    }

    /// Expectation on the eigenstate with eigenvalue `lambda` encoded in
    /// every windowed inertial mode.
    pub fn expectation_eigenstate(&self, lambda: i64) -> f64 {
        lambda as f64
            * self
                .rho
                .iter()
                .zip(&self.canonicity)
                .map(|(r, q)| r * q)
                .sum::<f64>()
    }

    pub fn expectation_vacuum(&self) -> f64 {
        0.0
    }
}

/// Truncated Fock realization of one wedge part over the discretized
/// inertial modes, for cross-validation at small sizes. The wedge mode
/// `b_p` is the windowed linear combination
/// `sqrt(w_p) sum_l sqrt(w_l) alpha*_pl (a_l + e^{-pi p/a} a†_l)` (wedge I;
/// wedge II carries `alpha` in place of `alpha*`).
pub fn wedge_fock_realization(
    kernel: &RindlerKernel,
    wedge: Wedge,
    rho: &[f64],
    modeset: &ModeSet,
) -> Result<FockOperator> {
    let n_l = kernel.l_points.len();
    if modeset.n_modes() != n_l {
        return Err(Error::DimensionMismatch { got: modeset.n_modes(), expected: n_l });
    }
    if rho.len() != kernel.k_points.len() {
        return Err(Error::DimensionMismatch { got: rho.len(), expected: kernel.k_points.len() });
    }
    if modeset.dim() > 1 << 14 {
        return Err(Error::DimensionTooLarge { dim: modeset.dim(), limit: 1 << 14 });
    }
    let ladder = ladder_matrix(modeset.cutoff())?;
    let a_ops: Vec<CsMat> = (0..n_l)
        .map(|j| Ok(embed_operator(&ladder, j, modeset)?.mat))
        .collect::<Result<_>>()?;
    let b_ops: Vec<CsMat> = (0..n_l)
        .map(|j| Ok(embed_operator(&ladder, n_l + j, modeset)?.mat))
        .collect::<Result<_>>()?;

    let dim = modeset.dim();
    let mut total = CsMat::zero(dim);
    for (ik, &rk) in rho.iter().enumerate() {
        if rk == 0.0 {
            continue;
        }
        let eps = (-std::f64::consts::PI * kernel.k_points[ik] / kernel.acceleration).exp();
        let wp = kernel.k_weight;
        // windowed wedge mode on each field
        let mut wedge_a = CsMat::zero(dim);
        let mut wedge_b = CsMat::zero(dim);
        for il in 0..n_l {
            let coeff = match wedge {
                Wedge::I => kernel.alpha(ik, il).conj(),
                Wedge::II => kernel.alpha(ik, il),
            } * (wp * kernel.l_weights[il]).sqrt();
            let mix_a = a_ops[il].combine(c(1.0, 0.0), &a_ops[il].adjoint(), c(eps, 0.0));
            let mix_b = b_ops[il].combine(c(1.0, 0.0), &b_ops[il].adjoint(), c(eps, 0.0));
            wedge_a = wedge_a.combine(c(1.0, 0.0), &mix_a, coeff);
            wedge_b = wedge_b.combine(c(1.0, 0.0), &mix_b, coeff);
        }
        let cross = wedge_a
            .adjoint()
            .matmul(&wedge_b)
            .combine(c(0.0, -rk), &wedge_a.matmul(&wedge_b.adjoint()), c(0.0, rk));
        total = total.combine(c(1.0, 0.0), &cross, c(1.0, 0.0));
    }
    Ok(FockOperator::new(total))
}
