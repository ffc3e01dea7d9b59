//! Action of `U = exp(iH)` on a truncated Fock vector.
//!
//! The exponential is never formed. Each substep runs a Lanczos recursion
//! with full reorthogonalization and exponentiates the small tridiagonal
//! projection; substeps keep the effective `|H| * dt` small so short
//! recursions reach machine precision.
//!
//! Truncation leakage: after the final substep the amplitudes in the top
//! occupation band are removed and reported. Evolution inside the truncated
//! space is unitary, so any probability that reaches the boundary band is
//! exactly the part of the state the cutoff cannot certify; dropping it keeps
//! downstream expectation values free of edge artifacts and makes the norm
//! deficit of the returned state the leakage diagnostic.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockVector};

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    /// Convergence target for the Krylov residual estimate per substep.
    pub tol: f64,
    /// Krylov dimension cap per substep.
    pub max_krylov: usize,
    /// Give up once this many substeps still fail to converge.
    pub max_substeps: usize,
    /// Width of the occupation band treated as the truncation edge;
    /// 0 disables the projection.
    pub edge_band: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { tol: 1e-12, max_krylov: 64, max_substeps: 4096, edge_band: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct Evolved {
    pub state: FockVector,
    /// Probability mass removed from the cutoff edge band.
    pub leakage: f64,
    pub substeps: usize,
}

/// `exp(i T dt) e_1` for a real symmetric tridiagonal `T`.
fn tridiag_exp_e1(alphas: &[f64], betas: &[f64], dt: f64) -> Vec<Complex64> {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        t[(k, k)] = alphas[k];
        if k + 1 < m {
            t[(k, k + 1)] = betas[k];
            t[(k + 1, k)] = betas[k];
        }
    }
    let eig = t.symmetric_eigen();
    let mut u = vec![Complex64::new(0.0, 0.0); m];
    for col in 0..m {
        let phase = Complex64::new(0.0, dt * eig.eigenvalues[col]).exp();
        let w0 = eig.eigenvectors[(0, col)];
        for row in 0..m {
            u[row] += eig.eigenvectors[(row, col)] * phase * w0;
        }
    }
    u
}

fn try_substeps(
    h: &FockOperator,
    psi: &FockVector,
    nsub: usize,
    opts: &EvolveOptions,
) -> Option<FockVector> {
    let dt = 1.0 / nsub as f64;
    let dim = h.dim();
    let mut current = psi.amplitudes.clone();
    for _ in 0..nsub {
        let norm = current.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        basis.push(current.iter().map(|a| a / norm).collect());
        let mut converged = None;
        while basis.len() <= opts.max_krylov {
            let j = basis.len() - 1;
            let mut w = h.mat.matvec(&basis[j]);
            let alpha: f64 = basis[j]
                .iter()
                .zip(&w)
                .map(|(v, wv)| (v.conj() * wv).re)
                .sum();
            alphas.push(alpha);
            // full reorthogonalization keeps the recursion stable
            for v in &basis {
                let ip: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wv, vv) in w.iter_mut().zip(v) {
                    *wv -= ip * vv;
                }
            }
            let beta = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let u = tridiag_exp_e1(&alphas, &betas, dt);
            let err = beta * u.last().unwrap().norm() * dt;
            if beta < 1e-13 || err < opts.tol {
                converged = Some(u);
                break;
            }
            betas.push(beta);
            basis.push(w.into_iter().map(|a| a / beta).collect());
        }
        let u = converged?;
        let mut next = vec![Complex64::new(0.0, 0.0); dim];
        for (uk, vk) in u.iter().zip(&basis) {
            let s = uk * norm;
            for (nv, vv) in next.iter_mut().zip(vk) {
                *nv += s * vv;
            }
        }
        current = next;
    }
    Some(FockVector { modeset: psi.modeset.clone(), amplitudes: current })
}

/// Apply `exp(iH)` to `psi`. `H` must be Hermitian on the same space.
pub fn exp_evolve(h: &FockOperator, psi: &FockVector, opts: &EvolveOptions) -> Result<Evolved> {
    if h.dim() != psi.amplitudes.len() {
        return Err(Error::DimensionMismatch { got: psi.amplitudes.len(), expected: h.dim() });
    }
    if !h.hermitian {
        return Err(Error::NonHermitian { residual: h.mat.hermiticity_residual() });
    }
    let mut nsub = ((h.mat.max_abs_row_sum() / 8.0).ceil() as usize).max(1);
    loop {
        if let Some(mut state) = try_substeps(h, psi, nsub, opts) {
            let leakage = if opts.edge_band > 0 {
                state.project_out_edge(opts.edge_band)
            } else {
                0.0
            };
            return Ok(Evolved { state, leakage, substeps: nsub });
        }
        nsub *= 2;
        if nsub > opts.max_substeps {
            return Err(Error::NonConvergence { residual: f64::NAN, steps: nsub });
        }
    }
}

/// Dense unitary `exp(iH)` for small dimensions; used for spectrum checks.
/// Goes through the Hermitian eigendecomposition, `V exp(i diag) V†`.
pub fn dense_unitary(h: &FockOperator, limit: usize) -> Result<DMatrix<Complex64>> {
    let dim = h.dim();
    if dim > limit {
        return Err(Error::DimensionTooLarge { dim, limit });
    }
    if !h.hermitian {
        return Err(Error::NonHermitian { residual: h.mat.hermiticity_residual() });
    }
    let eig = h.mat.to_dense().symmetric_eigen();
    let mut phased = eig.eigenvectors.clone();
    for (col, lam) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::new(0.0, *lam).exp();
        for row in 0..dim {
            phased[(row, col)] *= phase;
        }
    }
    Ok(&phased * eig.eigenvectors.adjoint())
}
