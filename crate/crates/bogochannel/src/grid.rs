//! Position-representation eigenfunctions on a uniform quadrature grid.
//!
//! Variables are ordered `(x_0, y_0, x_1, y_1, ...)` with `x_k` the field-A
//! quadrature of mode `k` and `y_k` the field-B one. The eigenfunction of the
//! invariant observable with integer eigenvalue `lambda` is
//!
//! ```text
//! F_lambda = prod_k exp(i lambda angle_k) g(x_k^2 + y_k^2)
//! ```
//!
//! where `angle_k` is the polar angle of `(x_k, y_k)` measured from the
//! `x_k` axis and `g(s) = exp(-s / (2 width^2))`. With that orientation the
//! grid operator `sum_k rho_k (-i)(x_k d/dy_k - y_k d/dx_k)` returns
//! `+lambda` times the function; the phase factor alone is singular at the
//! per-mode origin, so residual norms exclude a small fixed disk there.

use num_complex::Complex64;

use crate::error::{Error, Result};

const GRID_POINT_BUDGET: usize = 1 << 24;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    n_modes: usize,
    h: f64,
    /// points per axis, odd so the origin is a grid point
    per_axis: usize,
}

impl GridSpec {
    pub fn new(n_modes: usize, extent: f64, h: f64) -> Result<Self> {
        if n_modes == 0 || !(h > 0.0) || !(extent > 0.0) {
            return Err(Error::InvalidParameter("grid needs n_modes >= 1, h > 0, extent > 0".into()));
        }
        let half = (extent / h).round() as usize;
        if half < 2 {
            return Err(Error::InvalidParameter("grid extent below two steps".into()));
        }
        let per_axis = 2 * half + 1;
        let axes = 2 * n_modes;
        let mut total: usize = 1;
        for _ in 0..axes {
            total = total
                .checked_mul(per_axis)
                .filter(|t| *t <= GRID_POINT_BUDGET)
                .ok_or(Error::DimensionBudget { dim: usize::MAX, budget: GRID_POINT_BUDGET })?;
        }
        Ok(GridSpec { n_modes, h, per_axis })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn axes(&self) -> usize {
        2 * self.n_modes
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn extent(&self) -> f64 {
        (self.per_axis as f64 - 1.0) / 2.0 * self.h
    }

    pub fn len(&self) -> usize {
        self.per_axis.pow(self.axes() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, axis_index: usize) -> f64 {
        (axis_index as f64 - (self.per_axis as f64 - 1.0) / 2.0) * self.h
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.per_axis.pow(axis as u32)
    }

    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.stride(axis)) % self.per_axis
    }

    fn on_boundary(&self, flat: usize) -> bool {
        (0..self.axes()).any(|ax| {
            let i = self.axis_index(flat, ax);
            i == 0 || i == self.per_axis - 1
        })
    }
}

#[derive(Clone, Debug)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Sampled eigenfunction with eigenvalue `lambda` and radial width `width`.
pub fn eigenfunction_grid(lambda: i64, width: f64, spec: &GridSpec) -> Result<GridFunction> {
    if !(width > 0.0) {
        return Err(Error::InvalidParameter("width must be positive".into()));
    }
    if spec.h > width / 4.0 {
        return Err(Error::GridTooCoarse { h: spec.h, width });
    }
    if spec.extent() < 5.0 * width {
        return Err(Error::InvalidParameter(format!(
            "grid extent {} must cover at least 5 widths",
            spec.extent()
        )));
    }
    let mut values = vec![c(0.0, 0.0); spec.len()];
    let inv_2w2 = 1.0 / (2.0 * width * width);
    for (flat, v) in values.iter_mut().enumerate() {
        let mut acc = c(1.0, 0.0);
        for k in 0..spec.n_modes {
            let x = spec.coord(spec.axis_index(flat, 2 * k));
            let y = spec.coord(spec.axis_index(flat, 2 * k + 1));
            let phase = lambda as f64 * y.atan2(x);
            let radial = (-(x * x + y * y) * inv_2w2).exp();
            acc *= Complex64::new(0.0, phase).exp() * radial;
        }
        *v = acc;
    }
    Ok(GridFunction { spec: *spec, values })
}

/// Central-difference application of the weighted angular operator
/// `sum_k rho_k (-i)(x_k d/dy_k - y_k d/dx_k)`; boundary band excluded.
pub fn apply_l_grid(f: &GridFunction, weights: &[f64]) -> Result<GridFunction> {
    let spec = &f.spec;
    if weights.len() != spec.n_modes {
        return Err(Error::DimensionMismatch { got: weights.len(), expected: spec.n_modes });
    }
    let inv_2h = 1.0 / (2.0 * spec.h);
    let mut values = vec![c(0.0, 0.0); spec.len()];
    for (flat, out) in values.iter_mut().enumerate() {
        if spec.on_boundary(flat) {
            continue;
        }
        let mut acc = c(0.0, 0.0);
        for (k, rho) in weights.iter().enumerate() {
            let ax = 2 * k;
            let ay = 2 * k + 1;
            let x = spec.coord(spec.axis_index(flat, ax));
            let y = spec.coord(spec.axis_index(flat, ay));
            let ddy = (f.values[flat + spec.stride(ay)] - f.values[flat - spec.stride(ay)]) * inv_2h;
            let ddx = (f.values[flat + spec.stride(ax)] - f.values[flat - spec.stride(ax)]) * inv_2h;
            acc += c(0.0, -rho) * (ddy * x - ddx * y);
        }
        *out = acc;
    }
    Ok(GridFunction { spec: *spec, values })
}

/// Points used for residual norms: off the boundary band and outside a disk
/// of `origin_radius` around every per-mode origin.
pub fn interior_mask(spec: &GridSpec, origin_radius: f64) -> Vec<bool> {
    let r2 = origin_radius * origin_radius;
    (0..spec.len())
        .map(|flat| {
            if spec.on_boundary(flat) {
                return false;
            }
            (0..spec.n_modes).all(|k| {
                let x = spec.coord(spec.axis_index(flat, 2 * k));
                let y = spec.coord(spec.axis_index(flat, 2 * k + 1));
                x * x + y * y >= r2
            })
        })
        .collect()
}

/// Relative eigen-residual `|(L - lambda) F| / |F|` over the interior mask.
pub fn eigen_residual(
    f: &GridFunction,
    weights: &[f64],
    lambda: i64,
    origin_radius: f64,
) -> Result<f64> {
    let lf = apply_l_grid(f, weights)?;
    let mask = interior_mask(&f.spec, origin_radius);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..f.values.len() {
        if mask[i] {
            num += (lf.values[i] - f.values[i] * lambda as f64).norm_sqr();
            den += f.values[i].norm_sqr();
        }
    }
    if den == 0.0 {
        return Err(Error::InvalidParameter("empty interior mask".into()));
    }
    Ok((num / den).sqrt())
}

/// Default origin exclusion radius for residual norms, as a fraction of the
/// Gaussian width.
pub const ORIGIN_RADIUS_WIDTHS: f64 = 0.5;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_grid_and_small_extent() {
        let spec = GridSpec::new(1, 6.0, 0.5).unwrap();
        assert!(matches!(
            eigenfunction_grid(1, 1.0, &spec),
            Err(Error::GridTooCoarse { .. })
        ));
        let tight = GridSpec::new(1, 3.0, 0.1).unwrap();
        assert!(eigenfunction_grid(1, 1.0, &tight).is_err());
    }

    #[test]
    fn lambda_zero_is_a_real_positive_gaussian() {
        let spec = GridSpec::new(1, 6.0, 0.2).unwrap();
        let f = eigenfunction_grid(0, 1.0, &spec).unwrap();
        for v in &f.values {
            assert_eq!(v.im, 0.0);
            assert!(v.re > 0.0);
        }
        // separability: value at (x, y) equals product of axis factors
        let mid = (spec.per_axis() - 1) / 2;
        let at = |ix: usize, iy: usize| f.values[ix + iy * spec.per_axis()];
        let x1 = mid + 5;
        let y1 = mid + 9;
        let v = at(x1, y1) * at(mid, mid);
        let w = at(x1, mid) * at(mid, y1);
        assert!((v - w).norm() < 1e-14);
    }

    #[test]
    fn rotation_multiplies_by_phase() {
        let spec = GridSpec::new(1, 6.0, 0.05).unwrap();
        let lambda = 2i64;
        let f = eigenfunction_grid(lambda, 1.0, &spec).unwrap();
        let theta = 0.37f64;
        let (s, co) = theta.sin_cos();
        // bilinear interpolation of F at the rotated point
        let n = spec.per_axis();
        let interp = |x: f64, y: f64| -> Complex64 {
            let gx = x / spec.h() + (n as f64 - 1.0) / 2.0;
            let gy = y / spec.h() + (n as f64 - 1.0) / 2.0;
            let (i0, j0) = (gx.floor() as usize, gy.floor() as usize);
            let (tx, ty) = (gx - i0 as f64, gy - j0 as f64);
            let at = |i: usize, j: usize| f.values[i + j * n];
            at(i0, j0) * (1.0 - tx) * (1.0 - ty)
                + at(i0 + 1, j0) * tx * (1.0 - ty)
                + at(i0, j0 + 1) * (1.0 - tx) * ty
                + at(i0 + 1, j0 + 1) * tx * ty
        };
        let phase = Complex64::new(0.0, lambda as f64 * theta).exp();
        for (x, y) in [(1.0, 0.5), (-0.8, 1.3), (2.0, -1.0)] {
            let rotated = interp(x * co - y * s, x * s + y * co);
            let expect = phase * interp(x, y);
            assert!(
                (rotated - expect).norm() < 40.0 * spec.h() * spec.h(),
                "rotation mismatch at ({x},{y}): {}",
                (rotated - expect).norm()
            );
        }
    }

    #[test]
    fn gaussian_is_annihilated_by_the_operator() {
        let spec = GridSpec::new(1, 6.0, 0.05).unwrap();
        let f = eigenfunction_grid(0, 1.0, &spec).unwrap();
        let r = eigen_residual(&f, &[1.0], 0, ORIGIN_RADIUS_WIDTHS).unwrap();
        assert!(r <= 1e-3, "lambda=0 residual {r}");
    }

    #[test]
    fn operator_is_exactly_linear() {
        let spec = GridSpec::new(1, 6.0, 0.25).unwrap();
        let f1 = eigenfunction_grid(1, 1.0, &spec).unwrap();
        let f2 = eigenfunction_grid(2, 1.2, &spec).unwrap();
        let (a, b) = (c(0.7, -0.2), c(-1.1, 0.4));
        let combo = GridFunction {
            spec,
            values: f1
                .values
                .iter()
                .zip(&f2.values)
                .map(|(u, v)| a * u + b * v)
                .collect(),
        };
        let lhs = apply_l_grid(&combo, &[1.0]).unwrap();
        let l1 = apply_l_grid(&f1, &[1.0]).unwrap();
        let l2 = apply_l_grid(&f2, &[1.0]).unwrap();
        for i in 0..lhs.values.len() {
            let rhs = a * l1.values[i] + b * l2.values[i];
            assert!((lhs.values[i] - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn halving_h_quarters_the_residual() {
        let lambda = 2;
        let coarse = GridSpec::new(1, 6.0, 0.1).unwrap();
        let fine = GridSpec::new(1, 6.0, 0.05).unwrap();
        let rc = eigen_residual(
            &eigenfunction_grid(lambda, 1.0, &coarse).unwrap(),
            &[1.0],
            lambda,
            ORIGIN_RADIUS_WIDTHS,
        )
        .unwrap();
        let rf = eigen_residual(
            &eigenfunction_grid(lambda, 1.0, &fine).unwrap(),
            &[1.0],
            lambda,
            ORIGIN_RADIUS_WIDTHS,
        )
        .unwrap();
        let factor = rc / rf;
        assert!((3.5..=4.5).contains(&factor), "convergence factor {factor}");
    }

    #[test]
    fn two_mode_product_keeps_eigenvalue() {
        let spec = GridSpec::new(2, 5.0, 0.25).unwrap();
        let f = eigenfunction_grid(1, 1.0, &spec).unwrap();
        let r = eigen_residual(&f, &[0.5, 0.5], 1, ORIGIN_RADIUS_WIDTHS).unwrap();
        assert!(r < 0.05, "two-mode residual {r}");
    }
}
