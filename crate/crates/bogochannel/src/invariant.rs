//! The invariant cross-field observable and its eigenstates.
//!
//! Per mode `k` the observable is `-i (a†_k b_k - a_k b†_k)` where `a` acts
//! on field A and `b` on field B; modes are combined with nonnegative weights
//! summing to one, which normalizes the multi-mode eigenvalue. In the rotated
//! modes `r± = (a ∓ i b) / sqrt(2)` each sector reads `n₊ - n₋`, so
//! eigenstates are occupation states of the rotated modes and the spectrum is
//! integer.
//!
//! Exact invariance holds for every field-symmetric quadratic generator when
//! the weights are constant across the modes the generator mixes; the uniform
//! weighting is the default for exactly that reason.

use num_complex::Complex64;

use crate::coeff::CoefficientMatrix;
use crate::error::{Error, Result};
use crate::fock::{CsMat, FockOperator, FockVector, ModeSet};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, Debug)]
pub struct InvariantObservable {
    modeset: ModeSet,
    weights: Vec<f64>,
    fock_form: FockOperator,
    coeff_form: CoefficientMatrix,
}

/// Weighted invariant observable in both representations.
///
/// Weights must be nonnegative and sum to 1 within 1e-12.
pub fn build_invariant(modeset: &ModeSet, weights: &[f64]) -> Result<InvariantObservable> {
    let m = modeset.n_modes();
    if weights.len() != m {
        return Err(Error::DimensionMismatch { got: weights.len(), expected: m });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::WeightSum { deviation: f64::NAN });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum { deviation: sum - 1.0 });
    }

    let mut coeff = CoefficientMatrix::zero(modeset.labels());
    for k in 0..m {
        coeff.add_number_term(k, m + k, c(0.0, -weights[k]));
        coeff.add_number_term(m + k, k, c(0.0, weights[k]));
    }

    // Fock form assembled directly from the ladder action, not through the
    // coefficient realization, so the two representations stay independent.
    let cutoff = modeset.cutoff();
    let mut trips: Vec<(usize, usize, Complex64)> = Vec::new();
    for idx in 0..modeset.dim() {
        for k in 0..m {
            let na = modeset.occupation(idx, k);
            let nb = modeset.occupation(idx, m + k);
            // -i rho a† b : lowers B, raises A
            if nb >= 1 && na < cutoff {
                let target = idx + modeset.stride(k) - modeset.stride(m + k);
                let amp = (nb as f64 * (na + 1) as f64).sqrt();
                trips.push((target, idx, c(0.0, -weights[k]) * amp));
            }
            // +i rho a b† : lowers A, raises B
            if na >= 1 && nb < cutoff {
                let target = idx - modeset.stride(k) + modeset.stride(m + k);
                let amp = (na as f64 * (nb + 1) as f64).sqrt();
                trips.push((target, idx, c(0.0, weights[k]) * amp));
            }
        }
    }
    let fock_form = FockOperator::new(CsMat::from_triplets(modeset.dim(), trips));
    debug_assert!(fock_form.hermitian);

    Ok(InvariantObservable {
        modeset: modeset.clone(),
        weights: weights.to_vec(),
        fock_form,
        coeff_form: coeff,
    })
}

/// Uniform weights `1/M`, the exactly-invariant default.
pub fn uniform_invariant(modeset: &ModeSet) -> Result<InvariantObservable> {
    let m = modeset.n_modes();
    build_invariant(modeset, &vec![1.0 / m as f64; m])
}

impl InvariantObservable {
    pub fn modeset(&self) -> &ModeSet {
        &self.modeset
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn fock_form(&self) -> &FockOperator {
        &self.fock_form
    }

    pub fn coeff_form(&self) -> &CoefficientMatrix {
        &self.coeff_form
    }

    /// Rayleigh quotient `<psi|L|psi> / <psi|psi>`.
    pub fn expectation(&self, psi: &FockVector) -> Result<f64> {
        let lpsi = self.fock_form.apply(psi)?;
        let n2: f64 = psi.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if n2 == 0.0 {
            return Err(Error::InvalidParameter("zero state".into()));
        }
        Ok(psi.inner(&lpsi).re / n2)
    }

    /// `<L²> - <L>²` on a normalized input.
    pub fn variance(&self, psi: &FockVector) -> Result<f64> {
        let lpsi = self.fock_form.apply(psi)?;
        let n2: f64 = psi.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if n2 == 0.0 {
            return Err(Error::InvalidParameter("zero state".into()));
        }
        let e = psi.inner(&lpsi).re / n2;
        let e2 = lpsi.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() / n2;
        Ok(e2 - e * e)
    }
}

/// Normalized commutator size `|[L, H]| / (|L| |H|)` in the coefficient
/// representation; exact, no truncation enters anywhere.
pub fn commutation_residual(l: &InvariantObservable, h: &CoefficientMatrix) -> Result<f64> {
    let bracket = crate::coeff::quad_bracket(&l.coeff_form, h)?;
    let denom = l.coeff_form.norm() * h.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(bracket.norm() / denom)
}

/// Occupation profile of the rotated-mode eigenstate.
#[derive(Clone, Debug, Default)]
pub enum EigenstateProfile {
    /// `n₊ = λ, n₋ = 0` per mode: the smallest cutoff footprint.
    #[default]
    Minimal,
    /// Superpose radial quanta `m` with the given relative amplitudes:
    /// `n₊ = λ + m, n₋ = m`. Mirrors a radial envelope choice.
    Radial(Vec<f64>),
}

/// Normalized eigenstate of the invariant observable with eigenvalue
/// `lambda`, built from rotated-mode occupations in every sector.
pub fn schwinger_eigenstate(
    lambda: i64,
    modeset: &ModeSet,
    profile: &EigenstateProfile,
) -> Result<FockVector> {
    let cutoff = modeset.cutoff() as i64;
    let radial: &[f64] = match profile {
        EigenstateProfile::Minimal => &[1.0],
        EigenstateProfile::Radial(w) => w,
    };
    if radial.is_empty() || radial.iter().all(|w| *w == 0.0) {
        return Err(Error::InvalidParameter("empty radial profile".into()));
    }
    let m_max = radial.len() as i64 - 1;
    if lambda.abs() + m_max > cutoff {
        return Err(Error::CapacityExceeded { lambda, capacity: cutoff - m_max });
    }

    // per-sector two-oscillator amplitudes over (n_a, n_b)
    let per = modeset.per_mode_dim();
    let mut sector = vec![c(0.0, 0.0); per * per];
    for (mrad, w) in radial.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let (nplus, nminus) = if lambda >= 0 {
            (lambda as usize + mrad, mrad)
        } else {
            (mrad, (-lambda) as usize + mrad)
        };
        accumulate_rotated_occupation(&mut sector, per, nplus, nminus, *w);
    }
    let norm: f64 = sector.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut sector {
        *a /= norm;
    }

    // tensor product over modes
    let m = modeset.n_modes();
    let mut state = FockVector::zero(modeset);
    for idx in 0..modeset.dim() {
        let mut amp = c(1.0, 0.0);
        for k in 0..m {
            let na = modeset.occupation(idx, k);
            let nb = modeset.occupation(idx, m + k);
            amp *= sector[na * per + nb];
            if amp == c(0.0, 0.0) {
                break;
            }
        }
        state.amplitudes[idx] = amp;
    }
    Ok(state)
}

/// Add `w * |n₊, n₋>` of the rotated modes, expanded over `(n_a, n_b)`.
///
/// Rotated-mode convention: `r± = (a ∓ i b)/sqrt(2)`, so
/// `r±† = (a† ± i b†)/sqrt(2)`.
fn accumulate_rotated_occupation(
    sector: &mut [Complex64],
    per: usize,
    nplus: usize,
    nminus: usize,
    w: f64,
) {
    // expand (r₊†)^{n₊} (r₋†)^{n₋} |0,0> / sqrt(n₊! n₋!) by applying the
    // ladder actions one quantum at a time
    let mut cur = vec![c(0.0, 0.0); per * per];
    cur[0] = c(w, 0.0);
    let root2inv = std::f64::consts::FRAC_1_SQRT_2;
    for step in 0..(nplus + nminus) {
        let sign = if step < nplus { c(0.0, 1.0) } else { c(0.0, -1.0) };
        let mut next = vec![c(0.0, 0.0); per * per];
        for na in 0..per {
            for nb in 0..per {
                let v = cur[na * per + nb];
                if v == c(0.0, 0.0) {
                    continue;
                }
                if na + 1 < per {
                    next[(na + 1) * per + nb] += v * root2inv * ((na + 1) as f64).sqrt();
                }
                if nb + 1 < per {
                    next[na * per + (nb + 1)] += sign * v * root2inv * ((nb + 1) as f64).sqrt();
                }
            }
        }
        let denom = if step < nplus {
            ((step + 1) as f64).sqrt()
        } else {
            ((step - nplus + 1) as f64).sqrt()
        };
        for a in &mut next {
            *a /= denom;
        }
        cur = next;
    }
    for (s, v) in sector.iter_mut().zip(cur) {
        *s += v;
    }
}
