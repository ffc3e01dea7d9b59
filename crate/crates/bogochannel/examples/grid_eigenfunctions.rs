//! Position-representation eigenfunctions on a quadrature grid: vortex-like
//! phase profiles times a radial Gaussian. The finite-difference angular
//! operator returns the integer eigenvalue with second-order accuracy.
//!
//! ```bash
//! cargo run --release --example grid_eigenfunctions
//! ```

use bogochannel::grid::{
    apply_l_grid, eigen_residual, eigenfunction_grid, GridSpec, ORIGIN_RADIUS_WIDTHS,
};

fn main() {
    let width = 5.0;
    let radius = ORIGIN_RADIUS_WIDTHS * width;
    println!("gaussian width {width}, extent 6 widths, origin disk radius {radius}\n");
    println!(
        "{:>8}  {:>10}  {:>14}  {:>14}  {:>8}",
        "lambda", "h", "residual", "residual(h/2)", "factor"
    );
    for lambda in 0..=3i64 {
        let h = 0.05;
        let spec = GridSpec::new(1, 6.0 * width, h).unwrap();
        let f = eigenfunction_grid(lambda, width, &spec).unwrap();
        let r = eigen_residual(&f, &[1.0], lambda, radius).unwrap();
        let spec_half = GridSpec::new(1, 6.0 * width, h / 2.0).unwrap();
        let f_half = eigenfunction_grid(lambda, width, &spec_half).unwrap();
        let r_half = eigen_residual(&f_half, &[1.0], lambda, radius).unwrap();
        println!(
            "{lambda:>8}  {h:>10}  {r:>14.3e}  {r_half:>14.3e}  {:>8.3}",
            r / r_half
        );
    }

    // pointwise look along a diagonal ray: L F / F -> lambda
    let lambda = 2i64;
    let spec = GridSpec::new(1, 6.0 * width, 0.05).unwrap();
    let f = eigenfunction_grid(lambda, width, &spec).unwrap();
    let lf = apply_l_grid(&f, &[1.0]).unwrap();
    println!("\npointwise (L F)/F along the diagonal, lambda = {lambda}:");
    let n = spec.per_axis();
    let mid = (n - 1) / 2;
    for step in [20usize, 60, 120, 200] {
        let idx = (mid + step) + (mid + step) * n;
        let ratio = lf.values[idx] / f.values[idx];
        let x = spec.coord(mid + step);
        println!("  at (x, y) = ({x:.2}, {x:.2}): {:.9}{:+.2e}i", ratio.re, ratio.im);
    }
}
