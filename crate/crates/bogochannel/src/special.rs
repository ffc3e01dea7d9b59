//! Complex gamma function, Lanczos approximation with reflection.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// g = 7, 9-term Lanczos coefficients
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Gamma(z) for complex z, principal values throughout.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    let out = gamma_unchecked(z);
    if !out.re.is_finite() || !out.im.is_finite() {
        return Err(Error::SpecialFunction(format!("gamma overflow at {z}")));
    }
    Ok(out)
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi_z = z * PI;
        return PI / (pi_z.sin() * gamma_unchecked(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &ci) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += ci / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// `|Gamma(ix)|^2 = pi / (x sinh(pi x))`, the closed modulus identity used to
/// cross-check purely imaginary arguments.
pub fn gamma_imag_modulus_sq(x: f64) -> f64 {
    PI / (x * (PI * x).sinh())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // independent oracle: Gamma(z) = ∫ exp(z u - e^u) du over the real line
    // (t = e^u substitution), trapezoid rule at double-exponential decay
    fn gamma_integral_oracle(z: Complex64) -> Complex64 {
        assert!(z.re >= 1.0);
        let h = 0.002;
        let (lo, hi) = (-40.0f64, 6.0f64);
        let n = ((hi - lo) / h) as usize;
        let mut acc = c(0.0, 0.0);
        for k in 0..=n {
            let u = lo + k as f64 * h;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            acc += (z * u - c(u.exp(), 0.0)).exp() * w;
        }
        acc * h
    }

    #[test]
    fn matches_integer_and_half_integer_values() {
        assert!((gamma(c(4.0, 0.0)).unwrap() - c(6.0, 0.0)).norm() < 1e-12);
        assert!((gamma(c(0.5, 0.0)).unwrap() - c(PI.sqrt(), 0.0)).norm() < 1e-13);
        assert!((gamma(c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn recurrence_holds_for_complex_arguments() {
        for z in [c(0.3, 1.7), c(2.5, -0.4), c(-1.3, 0.9), c(0.0, 2.0)] {
            let lhs = gamma(z + 1.0).unwrap();
            let rhs = z * gamma(z).unwrap();
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-12, "recurrence at {z}");
        }
    }

    #[test]
    fn agrees_with_integral_oracle() {
        for z in [c(1.0, 0.0), c(2.5, 1.5), c(1.0, -3.0), c(4.0, 10.0)] {
            let lanczos = gamma(z).unwrap();
            let oracle = gamma_integral_oracle(z);
            let rel = (lanczos - oracle).norm() / oracle.norm();
            assert!(rel < 1e-10, "z={z} rel={rel}");
        }
    }

    #[test]
    fn imaginary_axis_modulus_identity() {
        for x in [0.2, 0.7, 1.0, 3.0, 8.0, 20.0] {
            let g = gamma(c(0.0, x)).unwrap();
            let rel = (g.norm_sqr() - gamma_imag_modulus_sq(x)).abs() / gamma_imag_modulus_sq(x);
            assert!(rel < 1e-10, "x={x} rel={rel}");
        }
    }
}
